#include "ncbench/qformat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace ncbench {

double QFormatSpec::step() const { return std::ldexp(1.0, -frac_bits()); }

double QFormatSpec::min_value() const {
  return -std::ldexp(1.0, integer_bits - 1);
}

double QFormatSpec::max_value() const {
  return std::ldexp(1.0, integer_bits - 1) - step();
}

void QFormatSpec::validate() const {
  if (integer_bits < 1 || total_bits < integer_bits || total_bits > 32) {
    throw FormatError("invalid fixed-point format " + str() +
                      " (need 1 <= N <= M <= 32)");
  }
}

QFormatSpec QFormatSpec::parse(const std::string& text) {
  if (text.size() < 4 || (text[0] != 'Q' && text[0] != 'q')) {
    throw FormatError("bad format string '" + text + "', expected \"QM.N\"");
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos || dot == 1 || dot + 1 >= text.size()) {
    throw FormatError("bad format string '" + text + "', expected \"QM.N\"");
  }
  QFormatSpec spec;
  try {
    spec.total_bits = std::stoi(text.substr(1, dot - 1));
    spec.integer_bits = std::stoi(text.substr(dot + 1));
  } catch (const std::exception&) {
    throw FormatError("bad format string '" + text + "', expected \"QM.N\"");
  }
  spec.validate();
  return spec;
}

std::string QFormatSpec::str() const {
  return "Q" + std::to_string(total_bits) + "." + std::to_string(integer_bits);
}

double QValue::value() const { return std::ldexp(double(raw), -spec.frac_bits()); }

QValue quantize(double x, const QFormatSpec& spec) {
  spec.validate();
  if (!std::isfinite(x)) throw NumericError("quantize: non-finite input");

  QValue q;
  q.spec = spec;
  if (x <= spec.min_value()) {
    q.raw = static_cast<std::int32_t>(spec.raw_min());
    return q;
  }
  if (x >= spec.max_value()) {
    q.raw = static_cast<std::int32_t>(spec.raw_max());
    return q;
  }
  const double scaled = std::ldexp(x, spec.frac_bits());
  const double fl = std::floor(scaled);
  const double frac = scaled - fl;
  auto n = static_cast<std::int64_t>(fl);
  if (frac > 0.5) {
    n += 1;
  } else if (frac == 0.5) {
    n += (n & 1);  // ties to even
  }
  n = std::clamp(n, spec.raw_min(), spec.raw_max());
  q.raw = static_cast<std::int32_t>(n);
  return q;
}

std::int64_t rescale_raw(std::int64_t raw, int from_frac, int to_frac) {
  if (to_frac >= from_frac) return raw << (to_frac - from_frac);
  const int shift = from_frac - to_frac;
  std::int64_t q = raw >> shift;  // floor
  const std::int64_t rem = raw - (q << shift);
  const std::int64_t half = std::int64_t(1) << (shift - 1);
  if (rem > half) {
    q += 1;
  } else if (rem == half) {
    q += (q & 1);
  }
  return q;
}

QAccumulator::QAccumulator(int a_frac_bits, int b_frac_bits,
                           const QFormatSpec& intermediate, std::string context)
    : a_frac_(a_frac_bits),
      b_frac_(b_frac_bits),
      frac_bits_(a_frac_bits + b_frac_bits),
      intermediate_(intermediate),
      context_(std::move(context)) {
  intermediate_.validate();
}

void QAccumulator::add_product(const QValue& a, const QValue& b) {
  if (a.spec.frac_bits() != a_frac_ || b.spec.frac_bits() != b_frac_) {
    throw FormatError("qmul_acc: operand formats " + a.spec.str() + "," +
                      b.spec.str() + " do not match accumulator scale");
  }
  const __int128 sum =
      __int128(raw_) + __int128(std::int64_t(a.raw) * std::int64_t(b.raw));
  if (sum > __int128(INT64_MAX) || sum < __int128(INT64_MIN)) {
    throw OverflowError("fixed-point accumulator exceeded 64-bit mantissa" +
                        (context_.empty() ? "" : " in " + context_));
  }
  raw_ = static_cast<std::int64_t>(sum);
  check_range();
}

void QAccumulator::add_raw(std::int64_t raw_at_acc_scale) {
  const __int128 sum = __int128(raw_) + __int128(raw_at_acc_scale);
  if (sum > __int128(INT64_MAX) || sum < __int128(INT64_MIN)) {
    throw OverflowError("fixed-point accumulator exceeded 64-bit mantissa" +
                        (context_.empty() ? "" : " in " + context_));
  }
  raw_ = static_cast<std::int64_t>(sum);
  check_range();
}

double QAccumulator::value() const {
  return static_cast<double>(std::ldexp(static_cast<long double>(raw_), -frac_bits_));
}

void QAccumulator::check_range() const {
  const long double v = std::ldexp(static_cast<long double>(raw_), -frac_bits_);
  if (v < static_cast<long double>(intermediate_.min_value()) ||
      v > static_cast<long double>(intermediate_.max_value())) {
    throw OverflowError("intermediate result out of " + intermediate_.str() +
                        " range" + (context_.empty() ? "" : " in " + context_));
  }
}

QValue QAccumulator::requantize(const QFormatSpec& out) const {
  out.validate();
  const std::int64_t scaled = rescale_raw(raw_, frac_bits_, out.frac_bits());
  QValue q;
  q.spec = out;
  q.raw = static_cast<std::int32_t>(std::clamp(scaled, out.raw_min(), out.raw_max()));
  return q;
}

std::int64_t qmul_acc(std::int64_t acc, const QValue& a, const QValue& b) {
  return acc + std::int64_t(a.raw) * std::int64_t(b.raw);
}

namespace {

struct TableKey {
  int in_total, in_int, out_total, out_int;
  auto operator<=>(const TableKey&) const = default;
};

constexpr int kMaxTanhTableBits = 20;

std::map<TableKey, std::unique_ptr<std::vector<std::int32_t>>> g_tanh_tables;
std::mutex g_tanh_mutex;

}  // namespace

const std::vector<std::int32_t>& tanh_table(const QFormatSpec& in_spec,
                                            const QFormatSpec& out_spec) {
  in_spec.validate();
  out_spec.validate();
  if (in_spec.total_bits > kMaxTanhTableBits) {
    throw FormatError("tanh table for " + in_spec.str() + " would need 2^" +
                      std::to_string(in_spec.total_bits) + " entries");
  }
  const TableKey key{in_spec.total_bits, in_spec.integer_bits,
                     out_spec.total_bits, out_spec.integer_bits};
  std::lock_guard lock(g_tanh_mutex);
  auto it = g_tanh_tables.find(key);
  if (it == g_tanh_tables.end()) {
    auto table = std::make_unique<std::vector<std::int32_t>>();
    const std::int64_t lo = in_spec.raw_min();
    const std::int64_t hi = in_spec.raw_max();
    table->reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t raw = lo; raw <= hi; ++raw) {
      const long double x =
          std::ldexp(static_cast<long double>(raw), -in_spec.frac_bits());
      const double y = static_cast<double>(std::tanh(x));
      table->push_back(quantize(y, out_spec).raw);
    }
    it = g_tanh_tables.emplace(key, std::move(table)).first;
  }
  return *it->second;
}

QValue q_tanh(const QValue& x, const QFormatSpec& out_spec) {
  const auto& table = tanh_table(x.spec, out_spec);
  const std::size_t idx = static_cast<std::size_t>(std::int64_t(x.raw) - x.spec.raw_min());
  QValue q;
  q.spec = out_spec;
  q.raw = table[idx];
  return q;
}

}  // namespace ncbench

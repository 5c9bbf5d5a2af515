#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncbench/errors.hpp"

namespace ncbench {

// Signed fixed-point format QM.N: M total bits, N integer bits including the
// sign bit, F = M - N fractional bits. Values are raw * 2^-F with raw held in
// M-bit two's complement.
struct QFormatSpec {
  int total_bits = 16;
  int integer_bits = 4;

  int frac_bits() const { return total_bits - integer_bits; }
  double step() const;
  double min_value() const;
  double max_value() const;
  std::int64_t raw_min() const { return -(std::int64_t(1) << (total_bits - 1)); }
  std::int64_t raw_max() const { return (std::int64_t(1) << (total_bits - 1)) - 1; }

  void validate() const;  // throws FormatError
  bool operator==(const QFormatSpec& o) const = default;

  // Textual form "QM.N", e.g. "Q14.4".
  static QFormatSpec parse(const std::string& text);
  std::string str() const;
};

struct QValue {
  std::int32_t raw = 0;
  QFormatSpec spec;

  double value() const;
};

// Nearest representable value, ties to even, saturating at the range bounds.
QValue quantize(double x, const QFormatSpec& spec);

// Round-half-even rescaling of a raw mantissa between fractional precisions.
// Exact integer arithmetic; no saturation (callers saturate against a spec).
std::int64_t rescale_raw(std::int64_t raw, int from_frac, int to_frac);

// Exact multiply-accumulate over raw mantissas. The accumulator carries the
// full product precision (frac bits of a plus frac bits of b); nothing is
// rounded until requantize(). Every update checks that the accumulated value
// still fits the configured intermediate format and throws OverflowError
// otherwise, which signals a mis-sized layer.
class QAccumulator {
 public:
  QAccumulator(int a_frac_bits, int b_frac_bits, const QFormatSpec& intermediate,
               std::string context = {});

  void add_product(const QValue& a, const QValue& b);
  // Adds a term already expressed at the accumulator scale (e.g. a shifted bias).
  void add_raw(std::int64_t raw_at_acc_scale);

  std::int64_t raw() const { return raw_; }
  int frac_bits() const { return frac_bits_; }
  double value() const;

  // Final rounding into the output format (round-half-even, saturating).
  QValue requantize(const QFormatSpec& out) const;

 private:
  void check_range() const;

  std::int64_t raw_ = 0;
  int a_frac_;
  int b_frac_;
  int frac_bits_;
  QFormatSpec intermediate_;
  std::string context_;
};

// Convenience form mirroring the accumulate step on bare mantissas.
std::int64_t qmul_acc(std::int64_t acc, const QValue& a, const QValue& b);

// tanh through an exhaustive lookup table over every representable input, so
// q_tanh(x) == quantize(tanh(value(x)), out_spec) for all x. Tables are built
// lazily and cached per (input spec, output spec) pair.
QValue q_tanh(const QValue& x, const QFormatSpec& out_spec);

// Access to the underlying table (index = raw - raw_min of the input spec).
const std::vector<std::int32_t>& tanh_table(const QFormatSpec& in_spec,
                                            const QFormatSpec& out_spec);

}  // namespace ncbench

#pragma once

#include <string>

namespace fin::units {

// Physical dimension of a quantity appearing in scenario files. Values are
// normalized to base SI on parse: bits/s, ops/s, ops, seconds, watts,
// joules/bit, 1/s, bits.
enum class Dimension {
  kBandwidth,
  kOpsRate,
  kOps,
  kTime,
  kPower,
  kEnergyPerBit,
  kRate,
  kBits,
  kDimensionless,
};

std::string dimension_name(Dimension dim);

/// Parses "<number> <unit>" (or a bare number, or "inf") into base SI units.
/// Throws UnitError on an unknown suffix and ParseError on a bad number.
double parse_quantity(const std::string& text, Dimension dim);

}  // namespace fin::units

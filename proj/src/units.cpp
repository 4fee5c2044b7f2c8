#include "fin/units.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "fin/errors.hpp"

namespace fin::units {

namespace {

struct UnitEntry {
  const char* suffix;
  double scale;
};

const std::vector<UnitEntry>& suffix_table(Dimension dim) {
  static const std::vector<UnitEntry> bandwidth = {
      {"bps", 1.0},      {"bit/s", 1.0},    {"kbps", 1e3},  {"Kbps", 1e3},
      {"Mbps", 1e6},     {"Gbps", 1e9},     {"Tbps", 1e12},
  };
  static const std::vector<UnitEntry> ops_rate = {
      {"OPS", 1.0},   {"ops/s", 1.0}, {"KOPS", 1e3},  {"MOPS", 1e6},
      {"GOPS", 1e9},  {"TOPS", 1e12},
  };
  static const std::vector<UnitEntry> ops = {
      {"OPs", 1.0},  {"ops", 1.0},  {"KOPs", 1e3}, {"MOPs", 1e6},
      {"GOPs", 1e9}, {"TOPs", 1e12},
  };
  static const std::vector<UnitEntry> time = {
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9},
  };
  static const std::vector<UnitEntry> power = {
      {"W", 1.0}, {"mW", 1e-3}, {"kW", 1e3}, {"uW", 1e-6},
  };
  static const std::vector<UnitEntry> energy_per_bit = {
      {"J/bit", 1.0},  {"mJ/bit", 1e-3}, {"uJ/bit", 1e-6},
      {"nJ/bit", 1e-9}, {"pJ/bit", 1e-12},
  };
  static const std::vector<UnitEntry> rate = {
      {"/s", 1.0}, {"Hz", 1.0}, {"/min", 1.0 / 60.0},
  };
  static const std::vector<UnitEntry> bits = {
      {"bit", 1.0}, {"bits", 1.0}, {"B", 8.0}, {"KB", 8e3}, {"MB", 8e6},
  };
  static const std::vector<UnitEntry> none = {};
  switch (dim) {
    case Dimension::kBandwidth: return bandwidth;
    case Dimension::kOpsRate: return ops_rate;
    case Dimension::kOps: return ops;
    case Dimension::kTime: return time;
    case Dimension::kPower: return power;
    case Dimension::kEnergyPerBit: return energy_per_bit;
    case Dimension::kRate: return rate;
    case Dimension::kBits: return bits;
    case Dimension::kDimensionless: return none;
  }
  return none;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t");
  auto end = s.find_last_not_of(" \t");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

bool is_infinity_token(const std::string& s) {
  std::string lower;
  lower.reserve(s.size());
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(c)));
  return lower == "inf" || lower == "infinity" || lower == "+inf";
}

}  // namespace

std::string dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::kBandwidth: return "bandwidth";
    case Dimension::kOpsRate: return "compute rate";
    case Dimension::kOps: return "operations";
    case Dimension::kTime: return "time";
    case Dimension::kPower: return "power";
    case Dimension::kEnergyPerBit: return "energy per bit";
    case Dimension::kRate: return "rate";
    case Dimension::kBits: return "bits";
    case Dimension::kDimensionless: return "dimensionless";
  }
  return "unknown";
}

double parse_quantity(const std::string& text, Dimension dim) {
  const std::string s = trim(text);
  if (s.empty()) {
    throw ParseError("empty quantity for " + dimension_name(dim));
  }
  if (is_infinity_token(s)) {
    return std::numeric_limits<double>::infinity();
  }

  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin) {
    throw ParseError("cannot parse number in quantity '" + s + "'");
  }
  std::string suffix = trim(std::string(ptr, end));
  if (suffix.empty()) {
    return value;  // already base SI
  }
  for (const auto& entry : suffix_table(dim)) {
    if (suffix == entry.suffix) {
      return value * entry.scale;
    }
  }
  throw UnitError("unknown " + dimension_name(dim) + " unit '" + suffix +
                  "' in quantity '" + s + "'");
}

}  // namespace fin::units

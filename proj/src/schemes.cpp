#include "msstab/schemes.hpp"

#include <algorithm>
#include <cctype>

namespace msstab {

namespace {

constexpr Rational r(std::int64_t n, std::int64_t d = 1) { return {n, d}; }

// alpha_0 = gamma_1 = 1 throughout.
const std::array<SchemeSpec, 6> kCatalog{{
    {Scheme::AB2, {r(1), r(-1), r(0)}, {r(0), r(3, 2), r(-1, 2)}, {r(1), r(0)}, std::nullopt},
    {Scheme::AB2I, {r(1), r(-1), r(0)}, {r(0), r(3, 2), r(-1, 2)}, {r(1), r(0)},
     std::array<Rational, 2>{r(0), r(-1, 2)}},
    {Scheme::AM2, {r(1), r(-1), r(0)}, {r(5, 12), r(8, 12), r(-1, 12)}, {r(1), r(0)}, std::nullopt},
    {Scheme::AM2I, {r(1), r(-1), r(0)}, {r(5, 12), r(8, 12), r(-1, 12)}, {r(1), r(0)},
     std::array<Rational, 2>{r(-5, 12), r(-1, 12)}},
    {Scheme::BDF2, {r(1), r(-4, 3), r(1, 3)}, {r(2, 3), r(0), r(0)}, {r(1), r(-1, 3)}, std::nullopt},
    {Scheme::BDF2I, {r(1), r(-4, 3), r(1, 3)}, {r(2, 3), r(0), r(0)}, {r(1), r(-1, 3)},
     std::array<Rational, 2>{r(-2, 3), r(1, 3)}},
}};

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::AB2: return "ab2";
    case Scheme::AB2I: return "ab2i";
    case Scheme::AM2: return "am2";
    case Scheme::AM2I: return "am2i";
    case Scheme::BDF2: return "bdf2";
    case Scheme::BDF2I: return "bdf2i";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (Scheme s : kAllSchemes) {
    if (to_string(s) == lower) return s;
  }
  return std::nullopt;
}

Scheme standard_variant(Scheme s) {
  switch (s) {
    case Scheme::AB2I: return Scheme::AB2;
    case Scheme::AM2I: return Scheme::AM2;
    case Scheme::BDF2I: return Scheme::BDF2;
    default: return s;
  }
}

Scheme improved_variant(Scheme s) {
  switch (s) {
    case Scheme::AB2: return Scheme::AB2I;
    case Scheme::AM2: return Scheme::AM2I;
    case Scheme::BDF2: return Scheme::BDF2I;
    default: return s;
  }
}

const SchemeSpec& catalog(Scheme s) { return kCatalog[static_cast<std::size_t>(s)]; }

}  // namespace msstab

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "halflab/rational.hpp"
#include "halflab/sets.hpp"

namespace halflab {

// Exact density value in [0, 1].
struct Density {
  Rat value;
};

Density make_density(const Rat& value);

struct DensityWindow {
  std::uint64_t from = 0;
  std::uint64_t to = 0;
  Rat min_seen;
  Rat max_seen;
  Rat last;
};

// d_n(X) = |X ∩ n| / n; requires n >= 1.
Density initial_density(const Set& x, std::uint64_t n);

// |S ∩ X ∩ n| / |X ∩ n|; requires |X ∩ n| >= 1.
Density relative_density(const Set& s, const Set& x, std::uint64_t n);

// Scans d_n over n in [from, to], 1 <= from <= to.
DensityWindow density_window(const Set& x, std::uint64_t from, std::uint64_t to);

// Prefix + period bit reduction of a schema, when the shape allows one.
// Combined periods are capped at 65536 bits; larger combinations return
// nullopt like irreducible shapes do.
struct PeriodicForm {
  std::vector<bool> prefix;
  std::vector<bool> period;
};
std::optional<PeriodicForm> periodic_form(const Set& x);

// Limiting density for periodic-reducible schemas.
std::optional<Density> exact_density(const Set& x);

struct ModeracyVerdict {
  bool exact = false;     // decided from periodic structure rather than a scan
  bool moderate = false;
  std::optional<Rat> exact_value;  // present for exact verdicts
  DensityWindow window;            // evidence for estimated verdicts
};

// Moderate = lower density > 0 and upper density < 1. Exact when the
// schema reduces to a periodic form (then moderate <=> 0 < d < 1);
// otherwise estimated from a window scan with the rule
//   moderate <=> margin < min_seen and max_seen < 1 - margin.
// Requires a schema class that is not provably finite.
ModeracyVerdict is_moderate(const Set& x, std::uint64_t from, std::uint64_t to,
                            const Rat& margin = Rat(1, 10));

}  // namespace halflab

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dispersal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

/// One grid point of the two-site, two-player competition sweep with
/// C(1) = 1, C(2) = c.
struct SweepRow {
  double c;
  double cover_ifd;
  double cover_optimal;
  double cover_welfare_opt;
};

inline constexpr const char* kSweepHeader =
    "c,cover_ifd,cover_optimal,cover_welfare_opt";

/// f = (1, f2), k = 2, c on a uniform grid of `steps` points over
/// [c_min, c_max]. Rejects f2 outside (0, 1] and c_max >= 1.
std::vector<SweepRow> sweep_rows(double f2, double c_min, double c_max,
                                 std::size_t steps);

/// Header plus one row per grid point, fixed 9-decimal formatting.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// Fixed-point formatting independent of the global locale.
std::string format_fixed(double value, int decimals = 9);

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace dispersal::cli

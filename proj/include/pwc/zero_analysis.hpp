#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pwc/averaged_function.hpp"
#include "pwc/extended.hpp"
#include "pwc/smooth_case.hpp"
#include "pwc/system_params.hpp"

namespace pwc {

struct CountFormulaInput {
  int n = 1;
  bool resonant = false;
};

/// H(n) = 4[(n+1)/2] + 3/2 (1 + (-1)^n)   for a != -b,
///        3[(n+1)/2] + (-1)^n             for a == -b.
int hn_formula(const CountFormulaInput& input);

struct Zero {
  double location = 0.0;
  double derivative = 0.0;
  /// Evaluation noise over |derivative|: how far roundoff alone can move the
  /// zero. Zero when no noise model was supplied.
  double uncertainty = 0.0;
};

struct ZeroReport {
  std::vector<Zero> zeros;       // simple zeros, increasing
  std::vector<Zero> non_simple;  // sign changes whose derivative fell under the threshold
  double interval_hi = 0.0;      // zeros are searched in (0, interval_hi)
  int grid_resolution = 0;       // after any doubling
  bool degenerate = false;       // the function vanished on the whole grid
  std::vector<std::string> warnings;
  std::size_t count() const { return zeros.size(); }
};

struct ZeroSearchOptions {
  int grid = 2000;
  double tolerance = 1e-12;
  int max_doublings = 4;
  /// Optional bound on the absolute evaluation error of the function at r.
  std::function<double(double)> noise;
};

/// Sign-change scan on r_k = k r_max / grid, k = 1..grid-1, refined by a
/// bracketing solver to `tolerance`. Brackets closer than two grid spacings
/// double the grid (up to max_doublings times), then UnresolvedClusterError.
/// A zero is simple when |F'| > 1e-8 (1 + max grid |F|).
ZeroReport count_simple_zeros(const std::function<double(double)>& fn, double r_max,
                              const ZeroSearchOptions& options = {});

/// 8 eps times the sum of the absolute values of the expansion terms at r.
double expansion_noise(const AveragedFunction& fn, double r);

/// Requires 0 < r_max < r0. Fills Zero::uncertainty from expansion_noise.
ZeroReport count_simple_zeros(const AveragedFunction& fn, double r_max,
                              const ZeroSearchOptions& options = {});

/// A member of a generating set:
///   monomial      r^power
///   kernel_a      r^power A00 (power > 0),  A00 - pi/a^2 (power == 0)
///   kernel_b      the same with B00 and b
///   tied_a        r^power A00 - (2/a) r^{power-1}
///   tied_b        r^power B00 + (2/b) r^{power-1}
enum class GeneratorKind { monomial, kernel_a, kernel_b, tied_a, tied_b };

struct Generator {
  GeneratorKind kind;
  int power;
};

/// lemma:       the independent functions listed for the count H(n); with
///              K = [(n+1)/2], monomials r^1..r^{2K-1} (plus r^{2K+1} for
///              even n) and kernel powers 0, 2, .., 2K (odd n) or 2K + 2
///              (even n). H(n) + 1 members.
/// realizable:  a basis of the averaged functions that degree-n perturbations
///              actually produce. For even n the top coefficients are tied,
///              b_{2K+1} = -(2/a) a_{K+1} and d_{2K+1} = (2/b) c_{K+1}, which
///              cancels the r^{n+1} growth of r^{2K+2} A00; r^{2K+1} and the
///              top kernel terms merge into tied_a / tied_b, one member fewer.
/// In the resonant case B00 == A00 and the kernel_b / tied_b members are dropped.
enum class GeneratingSet { lemma, realizable };

std::vector<Generator> generator_set(const SystemParams& params, int n,
                                     GeneratingSet set = GeneratingSet::lemma);

/// Number of zeros a generic member of the realizable set can be given:
/// H(n) for odd n, H(n) - 1 for even n.
int realizable_bound(int n, bool resonant);

/// Unit expansion of a generator (degree-n shapes).
BasisExpansion generator_expansion(const Generator& g, const SystemParams& params, int n);

std::string describe(const Generator& g);

/// Values of all members of a linear family at r, sharing kernel evaluations.
struct LinearFamily {
  std::function<std::vector<double>(double)> sample;
  int size = 0;
  double r_max = 0.0;
};

LinearFamily piecewise_family(const SystemParams& params, int n, double r_max,
                              GeneratingSet set = GeneratingSet::lemma);
LinearFamily smooth_family(double a, int n, double r_max);

/// Smooth generating set: V00 - 2 pi/a^2, r^{2i} V00 (i = 1..[(n+1)/2]+1),
/// r^{2i} (i = 1..[(n-1)/2]); n + 1 members.
int smooth_generator_count(int n);
SmoothExpansion smooth_generator_expansion(double a, int n, int index);

struct PlacementOptions {
  double r_max = 0.0;  // 0: default search bound
  std::uint64_t seed = 0x5eed;
  int candidates = 48;
  int grid = 2000;
  double max_condition = 1e12;
  double max_condition_extended = 1e30;  // place_zeros_extended
  GeneratingSet set = GeneratingSet::lemma;
};

/// Coefficients c with sum c_l G_l vanishing at the targets. Columns are
/// scaled by their max over (0, r_max]; the null space comes from an SVD,
/// and when it has dimension > 1 the candidate with no extra zeros and the
/// largest min |F'(target)| / max |F| among seeded random draws is kept.
/// Throws RankDeficiencyError above options.max_condition, and
/// std::invalid_argument for too many, unsorted or out-of-range targets.
std::vector<double> place_in_family(const LinearFamily& family, const std::vector<double>& targets,
                                    const PlacementOptions& options);

/// Expansion of degree n with simple zeros at the targets, normalized to
/// max |F| = 1 on the search grid: place_zeros_extended rounded to double.
/// Rounding can move the zeros by Zero::uncertainty; use the PlacedMember
/// itself when the exact count matters.
BasisExpansion place_zeros(const SystemParams& params, int n, const std::vector<double>& targets,
                           const PlacementOptions& options = {});

SmoothExpansion place_smooth_zeros(double a, int n, const std::vector<double>& targets,
                                   const PlacementOptions& options = {});

/// Member of a piecewise generating set with 50-digit coefficients.
/// operator() evaluates in double and falls back to 50 digits when |F| is
/// within roundoff of the sum of the term magnitudes, so signs stay reliable
/// when the coefficients are many orders larger than the function (the
/// non-resonant sets for n >= 4 are independent only to ~1e-14).
class PlacedMember {
 public:
  PlacedMember(const SystemParams& params, int n, GeneratingSet set, std::vector<Extended> coeffs);

  double operator()(double r) const;
  double evaluate_extended(double r) const;

  /// Coefficients rounded to double; adequate while the generator sums stay
  /// well above 1e-16 of the term magnitudes.
  BasisExpansion expansion() const;

  const SystemParams& params() const { return params_; }
  int degree() const { return n_; }
  const std::vector<Generator>& generators() const { return gens_; }
  const std::vector<Extended>& coefficients() const { return coeffs_; }
  void scale(const Extended& factor);

 private:
  SystemParams params_;
  int n_;
  std::vector<Generator> gens_;
  std::vector<Extended> coeffs_;
  std::vector<double> rounded_;
  Extended a_, b_, pi_;
};

/// place_zeros with the interpolation solved in 50 digits; normalized to
/// max |F| = 1 on the search grid. Throws RankDeficiencyError above
/// options.max_condition_extended.
PlacedMember place_zeros_extended(const SystemParams& params, int n,
                                  const std::vector<double>& targets,
                                  const PlacementOptions& options = {});

/// Rank with the numpy default tolerance sigma_max * max(rows, cols) * eps.
int numerical_rank(const Eigen::MatrixXd& m);

struct IndependenceResult {
  int rank = 0;
  int size = 0;
  double min_singular_value = 0.0;  // after scaling every column to unit norm
  std::vector<double> singular_values;
};

/// Generator values at `rows` Chebyshev points in (r_max/100, r_max).
Eigen::MatrixXd sample_generators(const LinearFamily& family, int rows);

/// Column-normalized singular values of a double sample matrix.
IndependenceResult independence_of(const Eigen::MatrixXd& samples);

/// Samples the generating set at 4x (set size) Chebyshev points in
/// (r_max/100, r_max) and takes the SVD in 50-digit arithmetic, so that
/// min_singular_value is resolved well below double roundoff. Rank counts
/// singular values above sigma_max * max(rows, cols) * 1e-40.
IndependenceResult independence_check(const SystemParams& params, int n, double r_max);
IndependenceResult smooth_independence_check(double a, int n, double r_max);

struct SmoothRankResult {
  int rank = 0;        // of the map from (f, g) coefficients onto (alpha, beta)
  int generators = 0;  // smooth_generator_count(n) = n + 1
  int alpha_size = 0;
  int beta_size = 0;
};

/// Settles how many smooth generators degree-n perturbations reach: for
/// even n the monomial part stops at r^{n-2}, and the rank is still n + 1.
SmoothRankResult smooth_coefficient_rank(double a, int n);

struct SurjectivityResult {
  int rank = 0;
  int expected = 0;
  std::vector<std::string> claimed;  // coefficient labels, e.g. "a_0", "d_3"
};

/// Rank of the map from perturbation coefficients onto the coefficients of
/// the pre-merge expansion that are claimed to be free:
///   odd n:  a_0..a_K, b_1..b_{2K-1} and the same for c, d;
///   even n: a_0..a_{K+1}, b_1..b_{2K-1}, b_{2K+1} and the same for c, d.
SurjectivityResult coefficient_surjectivity_check(const SystemParams& params, int n);

/// Perturbation coefficient map (columns = unit perturbations in flatten order,
/// rows = coeff_A, coeff_B, coeff_poly of the merged expansion).
Eigen::MatrixXd expansion_map(const SystemParams& params, int n);

struct Realization {
  PerturbationSpec pert;
  double residual = 0.0;  // ||M p - target|| / ||target||
};

/// Minimum-norm perturbation whose averaged function is proportional to the
/// target, scaled to max |coefficient| = 1. With null_weight > 0 a seeded
/// random element of the map's null space, of norm null_weight times the
/// minimum-norm solution, is added; the averaged function is unchanged.
/// The minimum-norm solution has f even and g odd in y. In that class the
/// return map is r + eps f0 + eps^2 f0 f0' / 2 + O(eps^3), so the zeros of
/// f0 move by O(eps^2) only; the null component makes it generic.
Realization realize_perturbation(const SystemParams& params, const BasisExpansion& target,
                                 double null_weight = 0.0, std::uint64_t seed = 0);

struct SearchSummary {
  int draws = 0;
  int skipped = 0;  // ill-conditioned placements or unresolved clusters
  int bound = 0;
  int max_count = 0;
  int max_realizable_count = 0;  // over draws that come from actual perturbations
  std::map<int, int> histogram;
  std::vector<int> exceeding;  // draw indices with more than `bound` zeros
};

/// Zero counts of random members, cycling through three kinds of draw:
///   0  a random perturbation, assembled;
///   1  H(n) random targets placed on the lemma set (place_zeros_extended);
///   2  realizable_bound random targets placed on the realizable set.
/// Kinds 0 and 2 are averaged functions of actual perturbations.
SearchSummary random_search(const SystemParams& params, int n, int draws, std::uint64_t seed,
                            double r_max = 0.0, int grid = 2000);

/// Same with random smooth perturbations and n random targets.
SearchSummary random_smooth_search(double a, int n, int draws, std::uint64_t seed,
                                   double r_max = 0.0, int grid = 2000);

}  // namespace pwc

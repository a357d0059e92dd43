#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "revoq/rng.hpp"

namespace revoq {

inline constexpr int64_t kMaxStateDim = int64_t{1} << 20;
inline constexpr int64_t kMaxDensityDim = int64_t{1} << 12;
inline constexpr double kTol = 1e-9;

using Amplitudes = Eigen::VectorXcd;

/// An n-bit computational basis label.
struct BasisIndex {
    uint64_t value = 0;
    int width = 0;

    BasisIndex() = default;
    BasisIndex(uint64_t v, int w);
};

/// Uniform superposition over a sorted set of basis indices:
/// amplitude 1/sqrt(|support|) on each support element.
struct SubsetState {
    int width;
    std::vector<uint64_t> support;  // strictly increasing, non-empty

    SubsetState(int width, std::vector<uint64_t> support);

    int64_t dim() const { return int64_t{1} << width; }
    size_t size() const { return support.size(); }
    bool contains(uint64_t x) const;
};

/// Unit-norm symmetrization of k distinct n-bit strings: uniform amplitude
/// 1/sqrt(k!) over every ordering x_{s(1)} || ... || x_{s(k)}.
struct TupleState {
    int width;
    std::vector<uint64_t> tuple;  // pairwise distinct

    TupleState(int width, std::vector<uint64_t> tuple);

    int k() const { return static_cast<int>(tuple.size()); }
};

/// Pure state as a full amplitude vector.
class DenseState {
public:
    DenseState() = default;
    explicit DenseState(Amplitudes amps);

    int64_t dim() const { return amps_.size(); }
    const Amplitudes& amplitudes() const { return amps_; }
    std::complex<double> amp(int64_t i) const { return amps_(i); }

    double norm() const { return amps_.norm(); }
    bool is_normalized(double tol = kTol) const;

    static DenseState basis(int64_t dim, uint64_t index);

    /// Debug serialization: JSON array of (index, re, im) triples for the
    /// nonzero amplitudes.
    std::string to_json() const;

private:
    Amplitudes amps_;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(Eigen::MatrixXcd m);

    int64_t dim() const { return m_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    static DensityMatrix pure(const DenseState& s);

    /// Hermitian to tol, PSD up to -tol, trace 1 +- tol.
    bool is_valid(double tol = kTol) const;

private:
    Eigen::MatrixXcd m_;
};

enum class MeasureOutcome { kAccept, kReject };

DenseState subset_to_dense(const SubsetState& s);

DenseState tuple_to_dense(const TupleState& t);

DenseState tensor_power(const DenseState& s, int copies);

DenseState tensor(const DenseState& a, const DenseState& b);

/// |<target|state>|^2.
double project_accept_prob(const DenseState& state, const DenseState& target);

/// Two-outcome projective measurement {|target><target|, I - ...}. Returns
/// the sampled outcome and the renormalized post-measurement state.
std::pair<MeasureOutcome, DenseState> project_and_collapse(const DenseState& state,
                                                           const DenseState& target,
                                                           SplitRng& rng);

/// Computational-basis measurement of the full register.
uint64_t measure_computational(const DenseState& state, SplitRng& rng);

/// Register-wise computational measurement of |S>^{(x) k}: k iid uniform
/// draws from the support (the Born rule on a product of subset states).
std::vector<uint64_t> measure_subset_copies(const SubsetState& s, int copies, SplitRng& rng);

/// Computational measurement of one register of a multi-register state.
/// Registers are reg_bits wide; register 0 holds the most significant bits.
/// Returns the outcome and the renormalized collapsed state.
std::pair<uint64_t, DenseState> measure_register(const DenseState& state, int total_regs,
                                                 int reg_bits, int which, SplitRng& rng);

/// E_S |S><S|^{(x) k} over size-s subsets S of `superset` (default: the full
/// n-bit domain). Exact enumeration when the work estimate fits the budget;
/// Monte-Carlo with `mc_samples` subsets otherwise.
DensityMatrix avg_subset_density(int width, int subset_size, int copies,
                                 const std::optional<std::vector<uint64_t>>& superset = std::nullopt,
                                 std::optional<int64_t> mc_samples = std::nullopt,
                                 SplitRng* rng = nullptr);

/// E_X |sigma_X><sigma_X| over size-k subsets X of `superset`.
DensityMatrix avg_tuple_density(int width, int copies,
                                const std::optional<std::vector<uint64_t>>& superset = std::nullopt,
                                std::optional<int64_t> mc_samples = std::nullopt,
                                SplitRng* rng = nullptr);

/// 1/2 * sum |eig(a - b)|, via Hermitian eigendecomposition.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// All size-k index combinations of [0, n), lexicographic. Helper shared by
/// the exact-average enumerators and test oracles.
std::vector<std::vector<int>> combinations(int n, int k);

}  // namespace revoq

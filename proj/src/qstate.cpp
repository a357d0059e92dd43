#include "revoq/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "revoq/errors.hpp"

namespace revoq {

namespace {

void check_width(int width, int max_bits) {
    if (width < 1 || width > max_bits) {
        throw DimensionTooLarge("width " + std::to_string(width) + " outside [1, " +
                                std::to_string(max_bits) + "]");
    }
}

int64_t checked_pow_dim(int64_t dim, int copies, int64_t limit) {
    int64_t total = 1;
    for (int i = 0; i < copies; ++i) {
        if (total > limit / dim) throw DimensionTooLarge("tensor dimension exceeds budget");
        total *= dim;
    }
    return total;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

BasisIndex::BasisIndex(uint64_t v, int w) : value(v), width(w) {
    check_width(w, 63);
    if (v >= (uint64_t{1} << w)) throw BadParameter("BasisIndex: value out of range for width");
}

SubsetState::SubsetState(int width_in, std::vector<uint64_t> support_in)
    : width(width_in), support(std::move(support_in)) {
    check_width(width, 20);
    if (support.empty()) throw BadParameter("SubsetState: empty support");
    const uint64_t dom = uint64_t{1} << width;
    for (size_t i = 0; i < support.size(); ++i) {
        if (support[i] >= dom) throw BadParameter("SubsetState: index out of domain");
        if (i > 0 && support[i] <= support[i - 1]) {
            throw BadParameter("SubsetState: support must be strictly increasing");
        }
    }
}

bool SubsetState::contains(uint64_t x) const {
    return std::binary_search(support.begin(), support.end(), x);
}

TupleState::TupleState(int width_in, std::vector<uint64_t> tuple_in)
    : width(width_in), tuple(std::move(tuple_in)) {
    check_width(width, 20);
    if (tuple.empty()) throw BadParameter("TupleState: empty tuple");
    const uint64_t dom = uint64_t{1} << width;
    auto sorted = tuple;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] >= dom) throw BadParameter("TupleState: index out of domain");
        if (i > 0 && sorted[i] == sorted[i - 1]) {
            throw BadParameter("TupleState: entries must be pairwise distinct");
        }
    }
}

DenseState::DenseState(Amplitudes amps) : amps_(std::move(amps)) {
    if (amps_.size() < 1) throw BadParameter("DenseState: empty amplitude vector");
    if (amps_.size() > kMaxStateDim) throw DimensionTooLarge("DenseState: dim exceeds budget");
}

bool DenseState::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

DenseState DenseState::basis(int64_t dim, uint64_t index) {
    if (index >= static_cast<uint64_t>(dim)) throw BadParameter("basis: index out of range");
    Amplitudes v = Amplitudes::Zero(dim);
    v(static_cast<int64_t>(index)) = 1.0;
    return DenseState(std::move(v));
}

std::string DenseState::to_json() const {
    std::ostringstream out;
    out.precision(17);
    out << "[";
    bool first = true;
    for (int64_t i = 0; i < amps_.size(); ++i) {
        if (amps_(i) == std::complex<double>{0.0, 0.0}) continue;
        if (!first) out << ",";
        first = false;
        out << "[" << i << "," << amps_(i).real() << "," << amps_(i).imag() << "]";
    }
    out << "]";
    return out.str();
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionMismatch("DensityMatrix: not square");
    if (m_.rows() > kMaxDensityDim) throw DimensionTooLarge("DensityMatrix: dim exceeds budget");
}

DensityMatrix DensityMatrix::pure(const DenseState& s) {
    if (s.dim() > kMaxDensityDim) throw DimensionTooLarge("pure: dim exceeds density budget");
    return DensityMatrix(s.amplitudes() * s.amplitudes().adjoint());
}

bool DensityMatrix::is_valid(double tol) const {
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(m_.trace().real() - 1.0) > tol || std::abs(m_.trace().imag()) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

DenseState subset_to_dense(const SubsetState& s) {
    Amplitudes v = Amplitudes::Zero(s.dim());
    const double a = 1.0 / std::sqrt(static_cast<double>(s.size()));
    for (uint64_t x : s.support) v(static_cast<int64_t>(x)) = a;
    return DenseState(std::move(v));
}

DenseState tuple_to_dense(const TupleState& t) {
    const int k = t.k();
    if (int64_t{k} * t.width > 20) throw DimensionTooLarge("tuple_to_dense: k*width exceeds 20 bits");
    const int64_t dim = int64_t{1} << (k * t.width);
    Amplitudes v = Amplitudes::Zero(dim);

    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    const double a = 1.0 / std::sqrt(factorial(k));
    do {
        uint64_t idx = 0;
        for (int i = 0; i < k; ++i) idx = (idx << t.width) | t.tuple[order[i]];
        v(static_cast<int64_t>(idx)) = a;
    } while (std::next_permutation(order.begin(), order.end()));
    return DenseState(std::move(v));
}

DenseState tensor(const DenseState& a, const DenseState& b) {
    if (a.dim() > kMaxStateDim / b.dim()) throw DimensionTooLarge("tensor: dim exceeds budget");
    Amplitudes v(a.dim() * b.dim());
    for (int64_t i = 0; i < a.dim(); ++i) {
        v.segment(i * b.dim(), b.dim()) = a.amp(i) * b.amplitudes();
    }
    return DenseState(std::move(v));
}

DenseState tensor_power(const DenseState& s, int copies) {
    if (copies < 1) throw BadParameter("tensor_power: copies must be >= 1");
    checked_pow_dim(s.dim(), copies, kMaxStateDim);
    DenseState out = s;
    for (int i = 1; i < copies; ++i) out = tensor(out, s);
    return out;
}

double project_accept_prob(const DenseState& state, const DenseState& target) {
    if (state.dim() != target.dim()) throw DimensionMismatch("project_accept_prob: dims differ");
    const std::complex<double> ip = target.amplitudes().dot(state.amplitudes());
    return std::norm(ip);
}

std::pair<MeasureOutcome, DenseState> project_and_collapse(const DenseState& state,
                                                           const DenseState& target,
                                                           SplitRng& rng) {
    if (state.dim() != target.dim()) throw DimensionMismatch("project_and_collapse: dims differ");
    const std::complex<double> ip = target.amplitudes().dot(state.amplitudes());
    const double p = std::min(1.0, std::norm(ip));
    if (rng.next_double() < p) {
        Amplitudes post = ip * target.amplitudes();
        post /= post.norm();
        return {MeasureOutcome::kAccept, DenseState(std::move(post))};
    }
    Amplitudes post = state.amplitudes() - ip * target.amplitudes();
    const double n = post.norm();
    if (n <= 1e-15) {
        // Rejection of a state (numerically) equal to the target; collapse is
        // ill defined, return the target's orthogonal complement of measure 0
        // as the zero-probability branch never used downstream.
        post = state.amplitudes();
    } else {
        post /= n;
    }
    return {MeasureOutcome::kReject, DenseState(std::move(post))};
}

uint64_t measure_computational(const DenseState& state, SplitRng& rng) {
    if (!state.is_normalized(1e-6)) throw BadParameter("measure_computational: state not normalized");
    double u = rng.next_double();
    double acc = 0.0;
    const auto& v = state.amplitudes();
    for (int64_t i = 0; i < v.size(); ++i) {
        acc += std::norm(v(i));
        if (u < acc) return static_cast<uint64_t>(i);
    }
    return static_cast<uint64_t>(v.size() - 1);
}

std::vector<uint64_t> measure_subset_copies(const SubsetState& s, int copies, SplitRng& rng) {
    std::vector<uint64_t> out(copies);
    for (int i = 0; i < copies; ++i) out[i] = s.support[rng.below(s.support.size())];
    return out;
}

std::pair<uint64_t, DenseState> measure_register(const DenseState& state, int total_regs,
                                                 int reg_bits, int which, SplitRng& rng) {
    if (which < 0 || which >= total_regs) throw BadParameter("measure_register: bad register index");
    const int64_t dim = int64_t{1} << (total_regs * reg_bits);
    if (state.dim() != dim) throw DimensionMismatch("measure_register: dims differ");
    const int shift = reg_bits * (total_regs - 1 - which);
    const uint64_t mask = (uint64_t{1} << reg_bits) - 1;

    std::vector<double> prob(uint64_t{1} << reg_bits, 0.0);
    const auto& v = state.amplitudes();
    for (int64_t i = 0; i < dim; ++i) {
        prob[(static_cast<uint64_t>(i) >> shift) & mask] += std::norm(v(i));
    }
    double u = rng.next_double();
    uint64_t outcome = prob.size() - 1;
    double acc = 0.0;
    for (uint64_t o = 0; o < prob.size(); ++o) {
        acc += prob[o];
        if (u < acc) {
            outcome = o;
            break;
        }
    }
    Amplitudes post = Amplitudes::Zero(dim);
    for (int64_t i = 0; i < dim; ++i) {
        if (((static_cast<uint64_t>(i) >> shift) & mask) == outcome) post(i) = v(i);
    }
    const double n = post.norm();
    if (n <= 1e-15) throw BadParameter("measure_register: zero-probability branch");
    post /= n;
    return {outcome, DenseState(std::move(post))};
}

std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<uint64_t> default_domain(int width) {
    std::vector<uint64_t> t(uint64_t{1} << width);
    std::iota(t.begin(), t.end(), 0);
    return t;
}

using StateFactory = std::function<DenseState(const std::vector<uint64_t>&)>;

DensityMatrix average_over_subsets(int width, int subset_size,
                                   const std::optional<std::vector<uint64_t>>& superset,
                                   std::optional<int64_t> mc_samples, SplitRng* rng,
                                   const StateFactory& make_state, int64_t out_dim) {
    const std::vector<uint64_t> domain = superset ? *superset : default_domain(width);
    const int t = static_cast<int>(domain.size());
    if (subset_size < 1 || subset_size > t) throw BadParameter("average: subset size out of range");
    if (out_dim > kMaxDensityDim) throw DimensionTooLarge("average: density dim exceeds budget");

    const double n_subsets = binomial(t, subset_size);
    const double work = n_subsets * static_cast<double>(out_dim) * static_cast<double>(out_dim);
    constexpr double kWorkBudget = 4e9;

    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(out_dim, out_dim);
    std::vector<uint64_t> subset(subset_size);

    if (work <= kWorkBudget) {
        for (const auto& comb : combinations(t, subset_size)) {
            for (int i = 0; i < subset_size; ++i) subset[i] = domain[comb[i]];
            const DenseState st = make_state(subset);
            acc.noalias() += st.amplitudes() * st.amplitudes().adjoint();
        }
        acc /= n_subsets;
        return DensityMatrix(std::move(acc));
    }
    if (!mc_samples || !rng) {
        throw BudgetExceeded("average: exact enumeration infeasible and no sample count declared");
    }
    for (int64_t s = 0; s < *mc_samples; ++s) {
        auto picks = rng->distinct_sorted(t, subset_size);
        for (int i = 0; i < subset_size; ++i) subset[i] = domain[picks[i]];
        std::sort(subset.begin(), subset.end());
        const DenseState st = make_state(subset);
        acc.noalias() += st.amplitudes() * st.amplitudes().adjoint();
    }
    acc /= static_cast<double>(*mc_samples);
    return DensityMatrix(std::move(acc));
}

}  // namespace

DensityMatrix avg_subset_density(int width, int subset_size, int copies,
                                 const std::optional<std::vector<uint64_t>>& superset,
                                 std::optional<int64_t> mc_samples, SplitRng* rng) {
    const int64_t dim = checked_pow_dim(int64_t{1} << width, copies, kMaxDensityDim);
    return average_over_subsets(
        width, subset_size, superset, mc_samples, rng,
        [&](const std::vector<uint64_t>& subset) {
            return tensor_power(subset_to_dense(SubsetState(width, subset)), copies);
        },
        dim);
}

DensityMatrix avg_tuple_density(int width, int copies,
                                const std::optional<std::vector<uint64_t>>& superset,
                                std::optional<int64_t> mc_samples, SplitRng* rng) {
    const int64_t dim = checked_pow_dim(int64_t{1} << width, copies, kMaxDensityDim);
    return average_over_subsets(
        width, copies, superset, mc_samples, rng,
        [&](const std::vector<uint64_t>& subset) {
            return tuple_to_dense(TupleState(width, subset));
        },
        dim);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("trace_distance: dims differ");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.matrix() - b.matrix(),
                                                       Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace revoq

#pragma once

// Entanglement-assisted fingerprinting.  Alice and Bob share a maximally
// entangled pair of m-level systems, apply U_x^* and U_y locally, and the
// referee projects onto the entangled state.  The acceptance probability is
// |tr(U_x^dag U_y)|^2 / m^2, so the error rate of a protocol is governed by
// the pairwise trace overlaps of the unitary family it uses.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smpfp/classical.hpp"
#include "smpfp/rational.hpp"

namespace smpfp {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kStructuralTolerance = 1e-12;
inline constexpr double kAggregateTolerance = 1e-9;
inline constexpr std::size_t kMaxTensorDim = 64;

/// Sum in a fixed balanced binary tree, so the result does not depend on how
/// the caller chunked the work.
template <typename T>
T pairwise_sum(const std::vector<T>& values, std::size_t begin, std::size_t end) {
  if (end <= begin) return T{};
  if (end - begin <= 8) {
    T s{};
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(values, begin, mid) + pairwise_sum(values, mid, end);
}

template <typename T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(values, 0, values.size());
}

/// max_{ij} |(U^dag U - I)_{ij}|
inline double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) throw InvalidArgument("unitarity check needs a square matrix");
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kStructuralTolerance) {
  return u.rows() == u.cols() && unitarity_defect(u) <= tol;
}

/// tr(A^dag B) / m
inline Complex trace_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw InvalidArgument("trace_overlap needs square matrices of equal dimension");
  }
  return a.conjugate().cwiseProduct(b).sum() / static_cast<double>(a.rows());
}

/// |psi+> = d^{-1/2} sum_k |k>|k> in the computational basis.
struct EntangledResource {
  std::size_t dim = 1;

  explicit EntangledResource(std::size_t d) : dim(d) {
    if (d < 1) throw InvalidArgument("entangled resource dimension must be >= 1");
    if (d > kMaxTensorDim) throw InvalidArgument("tensor construction capped at dimension 64");
  }

  /// Vector over the d^2-dimensional product space, index (i, j) -> i*d + j.
  ComplexVector state() const {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim * dim));
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t k = 0; k < dim; ++k) v(static_cast<Eigen::Index>(k * dim + k)) = amp;
    return v;
  }

  /// (A (x) B) applied to the state, without forming the d^2 x d^2 operator.
  ComplexVector apply(const ComplexMatrix& a, const ComplexMatrix& b) const {
    const auto d = static_cast<Eigen::Index>(dim);
    const ComplexVector psi = state();
    struct Term {
      Eigen::Index k, l;
      Complex amp;
    };
    std::vector<Term> support;
    for (Eigen::Index k = 0; k < d; ++k) {
      for (Eigen::Index l = 0; l < d; ++l) {
        if (psi(k * d + l) != Complex{}) support.push_back({k, l, psi(k * d + l)});
      }
    }
    ComplexVector out = ComplexVector::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        Complex acc{};
        for (const auto& t : support) acc += a(i, t.k) * b(j, t.l) * t.amp;
        out(i * d + j) = acc;
      }
    }
    return out;
  }
};

/// <psi+| A^* (x) B |psi+>, computed on explicit d^2-dimensional vectors.
inline Complex entangled_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw InvalidArgument("entangled_overlap needs square matrices of equal dimension");
  }
  const EntangledResource resource(static_cast<std::size_t>(a.rows()));
  const ComplexVector out = resource.apply(a.conjugate(), b);
  return resource.state().dot(out);  // dot() conjugates its left operand
}

/// n unitaries in dimension m.
struct UnitaryFrame {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<ComplexMatrix> members;

  /// sum_{x,y} |tr(U_x^dag U_y)|^2, pairwise-summed in (x, y) row-major order.
  double frame_potential() const {
    std::vector<double> terms;
    terms.reserve(n * n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        const Complex t = trace_overlap(members[x], members[y]) * static_cast<double>(dim);
        terms.push_back(std::norm(t));
      }
    }
    return pairwise_sum(terms);
  }

  double max_unitarity_defect() const {
    double worst = 0.0;
    for (const auto& u : members) worst = std::max(worst, unitarity_defect(u));
    return worst;
  }

  /// max_x |tr(U_x^dag U_x) - m|
  double max_normalization_defect() const {
    double worst = 0.0;
    for (const auto& u : members) {
      worst = std::max(worst, std::abs((u.adjoint() * u).trace() - static_cast<double>(dim)));
    }
    return worst;
  }

  /// Referee acceptance |tr(U_x^dag U_y)|^2 / m^2.
  double acceptance(std::size_t x, std::size_t y) const {
    return std::norm(trace_overlap(members.at(x), members.at(y)));
  }
};

/// <j|U_x|k> = m^{-1/2} exp[2 pi i jk/m + 2 pi i (j + mk) x / n], with j, k in
/// [0, m) and x in [0, n).  Requires n >= m^2; at n = m^2 the members form an
/// orthonormal unitary basis, and for every n >= m^2 a tight frame.
inline UnitaryFrame utof_frame(std::size_t n, std::size_t m) {
  if (m < 1) throw InvalidArgument("frame dimension must be >= 1");
  if (n < m * m) {
    throw InvalidArgument("frame needs n >= m^2 (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
  UnitaryFrame frame;
  frame.n = n;
  frame.dim = m;
  frame.members.reserve(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t x = 0; x < n; ++x) {
    ComplexMatrix u(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        // Reduce the integer numerators before scaling so large n keeps full
        // phase precision.
        const double phase = two_pi * static_cast<double>((j * k) % m) / static_cast<double>(m) +
                             two_pi * static_cast<double>(((j + m * k) * x) % n) / static_cast<double>(n);
        u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = scale * std::polar(1.0, phase);
      }
    }
    frame.members.push_back(std::move(u));
  }
  return frame;
}

/// Error-free protocol verdict for n <= m^2 messages.
struct ErrorFreeVerdict {
  std::size_t n = 0;
  std::size_t m = 0;
  /// acceptance[x * n + y] = |<psi+| U_x^* (x) U_y |psi+>|^2
  std::vector<double> acceptance;
  double max_equal_deviation = 0.0;
  double max_unequal_acceptance = 0.0;
  bool error_free = false;
};

inline constexpr double kUnequalAcceptanceCeiling = 1e-20;

/// Uses the first n members of the m^2-element orthonormal basis.
inline ErrorFreeVerdict basis_protocol_verdict(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("needs n, m >= 1");
  if (n > m * m) throw InvalidArgument("the error-free protocol needs n <= m^2");
  const auto basis = utof_frame(m * m, m);
  ErrorFreeVerdict v;
  v.n = n;
  v.m = m;
  v.acceptance.resize(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double p = std::norm(entangled_overlap(basis.members[x], basis.members[y]));
      v.acceptance[x * n + y] = p;
      if (x == y) {
        v.max_equal_deviation = std::max(v.max_equal_deviation, std::abs(p - 1.0));
      } else {
        v.max_unequal_acceptance = std::max(v.max_unequal_acceptance, p);
      }
    }
  }
  v.error_free = v.max_equal_deviation <= kStructuralTolerance && v.max_unequal_acceptance <= kUnequalAcceptanceCeiling;
  return v;
}

/// Worst-case error of the permuted frame protocol: (n/m^2 - 1)/(n - 1) for
/// n >= m^2, and 0 below (the error-free regime).
inline Rational frame_protocol_error(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("needs n, m >= 1");
  const std::size_t m2 = m * m;
  if (n <= m2) return 0;
  return Rational(Integer(n) - Integer(m2), Integer(m2) * Integer(n - 1));
}

/// (n^2/m^2 - n)/(n^2 - n): mean acceptance over unequal frame pairs.
inline Rational expected_unequal_acceptance(std::size_t n, std::size_t m) {
  if (n < 2) return 0;
  const Integer m2 = Integer(m) * Integer(m);
  const Integer n_big(n);
  return Rational(n_big * n_big - n_big * m2, m2 * (n_big * n_big - n_big));
}

struct FrameAcceptanceStats {
  std::size_t n = 0;
  std::size_t m = 0;
  double mean_unequal_acceptance = 0.0;
  double max_unequal_acceptance = 0.0;
  double max_equal_deviation = 0.0;
  Rational expected_mean;
  bool one_sided = false;
  bool mean_matches = false;
};

inline constexpr std::size_t kMaxStatsDim = 16;
inline constexpr std::size_t kMaxStatsMessages = 4096;

/// Dense scan of all n^2 acceptance probabilities of the frame.
inline FrameAcceptanceStats frame_acceptance_stats(std::size_t n, std::size_t m) {
  if (m < 1 || n < m * m) throw InvalidArgument("acceptance stats need n >= m^2");
  if (m > kMaxStatsDim || n > kMaxStatsMessages) {
    throw BudgetExceeded("dense frame scan is limited to m <= 16, n <= 4096",
                         static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(m * m));
  }
  const auto frame = utof_frame(n, m);
  FrameAcceptanceStats s;
  s.n = n;
  s.m = m;
  std::vector<double> unequal;
  unequal.reserve(n * (n - 1));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double p = frame.acceptance(x, y);
      if (x == y) {
        s.max_equal_deviation = std::max(s.max_equal_deviation, std::abs(p - 1.0));
      } else {
        unequal.push_back(p);
        s.max_unequal_acceptance = std::max(s.max_unequal_acceptance, p);
      }
    }
  }
  s.mean_unequal_acceptance = unequal.empty() ? 0.0 : pairwise_sum(unequal) / static_cast<double>(unequal.size());
  s.expected_mean = expected_unequal_acceptance(n, m);
  s.one_sided = s.max_equal_deviation <= kStructuralTolerance;
  s.mean_matches = std::abs(s.mean_unequal_acceptance - to_double(s.expected_mean)) <= kAggregateTolerance;
  return s;
}

enum class RoundEvaluation {
  kTraceFormula,  // |tr(U^dag V)|^2 / m^2
  kStateVector,   // explicit |<psi+| U^* (x) V |psi+>|^2
};

/// Outcome-1 probability of one round: messages x, y relabeled by the shared
/// permutation, then the frame members' entangled overlap.
inline double simulate_frame_round(const UnitaryFrame& frame, const PermutationKey& perm, std::size_t x,
                                      std::size_t y, RoundEvaluation how = RoundEvaluation::kTraceFormula) {
  if (perm.size() != frame.n) throw InvalidArgument("permutation size does not match the frame");
  if (x >= frame.n || y >= frame.n) throw InvalidArgument("message index out of range");
  const auto& u = frame.members[perm(x)];
  const auto& v = frame.members[perm(y)];
  return how == RoundEvaluation::kStateVector ? std::norm(entangled_overlap(u, v)) : std::norm(trace_overlap(u, v));
}

inline double simulate_frame_round(std::size_t n, std::size_t m, const PermutationKey& perm, std::size_t x,
                                      std::size_t y, RoundEvaluation how = RoundEvaluation::kTraceFormula) {
  return simulate_frame_round(utof_frame(n, m), perm, x, y, how);
}

/// Expected acceptance of (x, y) over a uniform shared permutation.  A uniform
/// permutation sends an unequal pair to every ordered unequal frame pair
/// equally often, so this is the mean over those pairs; equal pairs give the
/// mean self-acceptance.
inline double permutation_averaged_acceptance(const UnitaryFrame& frame, std::size_t x, std::size_t y) {
  if (x >= frame.n || y >= frame.n) throw InvalidArgument("message index out of range");
  std::vector<double> terms;
  for (std::size_t u = 0; u < frame.n; ++u) {
    for (std::size_t v = 0; v < frame.n; ++v) {
      if ((u == v) == (x == y)) terms.push_back(frame.acceptance(u, v));
    }
  }
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

}  // namespace smpfp

#pragma once

#include "hubbard/symmetry.hpp"

#include <Eigen/Eigenvalues>

#include <span>
#include <vector>

namespace hubbard {

inline constexpr Index kMaxDenseDim = 5000;

template <class Scalar>
struct Spectrum {
  Eigen::VectorXd values;  // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};

/// Dense Hermitian diagonalization. Each eigenvector is rotated so that its
/// largest-magnitude component is real and positive.
template <class Derived>
Spectrum<typename Derived::Scalar> diagonalize(const Eigen::MatrixBase<Derived>& h,
                                               bool with_vectors = true) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (h.rows() != h.cols()) throw std::invalid_argument("diagonalize: matrix is not square");
  if (h.rows() > kMaxDenseDim)
    throw CapacityError("diagonalize: dimension " + std::to_string(h.rows()) + " exceeds 5000");
  const Matrix m = h;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("diagonalize: matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> es(
      m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("diagonalize: solver failed");
  Spectrum<Scalar> out{es.eigenvalues(), {}};
  if (with_vectors) {
    out.vectors = es.eigenvectors();
    for (Index k = 0; k < out.vectors.cols(); ++k) {
      Index arg;
      out.vectors.col(k).cwiseAbs().maxCoeff(&arg);
      const Scalar pivot = out.vectors(arg, k);
      out.vectors.col(k) *= std::abs(pivot) / pivot;
    }
  }
  return out;
}

template <class Scalar>
Spectrum<Scalar> diagonalize(const Operator<Scalar>& h, bool with_vectors = true) {
  if (h.rows() > kMaxDenseDim)
    throw CapacityError("diagonalize: dimension " + std::to_string(h.rows()) + " exceeds 5000");
  return diagonalize(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(h), with_vectors);
}

/// max_k ‖H v_k - λ_k v_k‖.
template <class Scalar>
double max_residual(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& h,
                    const Spectrum<Scalar>& s) {
  return (h * s.vectors - s.vectors * s.values.template cast<Scalar>().asDiagonal())
      .colwise()
      .norm()
      .maxCoeff();
}

/// Ground-state weights on ψ_0, ψ_1, ... with c_0 > 0.
struct PerturbationCoefficients {
  std::vector<double> c;
  bool outside_window = false;  // J/U >= 0.2
};

PerturbationCoefficients perturbation_coefficients(const SymmetricSubspace& s, double j, double u);

enum class PairLabel {
  max_overlap,  // eigenstate with the largest weight in the n-doublon block
  highest,      // highest-energy eigenstate of the reduced problem
};

/// ⟨n-pair eigenstate| T |ground⟩, the drive matrix element per unit ΔJ.
struct PairAmplitude {
  cplx value;
  Index label = 0;
  double excitation_energy = 0.0;  // E_label - E_ground
  bool ambiguous = false;
  cplx alternative{};  // runner-up amplitude when ambiguous
};

PairAmplitude pair_amplitude(const SymmetricSubspace& s, double j, double u, int n_pairs,
                             PairLabel label = PairLabel::max_overlap);

struct ScalingFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int points = 0;
  bool identically_zero = false;  // no fit was attempted
};

inline constexpr double kZeroAmplitude = 1e-13;

/// Least-squares slope of log|y| against log x. Needs at least six points.
ScalingFit scaling_fit(std::span<const double> x, std::span<const double> y,
                       double zero_tolerance = kZeroAmplitude);

std::vector<double> log_grid(double lo, double hi, int points);
std::vector<double> linear_grid(double lo, double hi, int points);

/// pair_amplitude over a J/U grid at U = 1.
std::vector<PairAmplitude> amplitude_scan(const SymmetricSubspace& s, int n_pairs,
                                          std::span<const double> j_over_u,
                                          PairLabel label = PairLabel::max_overlap);

struct AmplitudeMaximum {
  double argmax = 0.0;
  double max_value = 0.0;  // |amplitude|^2
  bool interior = false;
  bool unimodal = false;
};

/// Maximum of |amplitude|^2 over the grid; default grid 0.01, 0.02, ..., 1.5.
AmplitudeMaximum amplitude_maximum(const SymmetricSubspace& s, int n_pairs,
                                   std::span<const double> grid = {});

/// 2-pair drive element on the 4-site cycle at U = 1, J = j_over_u.
struct SquareDoublePair {
  double krylov_element = 0.0;      // highest vs ground inside the closure
  double exact_element = 0.0;       // highest vs ground of the full sector
  double exact_manifold_max = 0.0;  // max over full-sector states with <D> > 1.5
};

SquareDoublePair square_double_pair(const SymmetricSubspace& square, double j_over_u);

}  // namespace hubbard

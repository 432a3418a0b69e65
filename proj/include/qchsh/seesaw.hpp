#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qchsh/chsh.hpp"
#include "qchsh/protocol.hpp"

namespace qchsh {

struct SeesawConfig {
  double epsilon = 0.1;              // perturbation mixing weight
  double perturb_probability = 0.5;  // chance to perturb at a stall
  int stall_threshold = 10;          // equal values that count as a stall
  double value_equality_tol = 1e-7;  // equality tolerance for stall detection
  int max_iterations = 2000;         // full update cycles per restart
  int restarts = 20;
  std::uint64_t seed = 1;

  bool operator==(const SeesawConfig&) const = default;
};

struct SeesawResult {
  double best_value = 0.0;
  // Input state(s) achieving best_value: one entry for single-channel and
  // unidirectional runs, the two factors for bidirectional runs.
  std::vector<DensityMatrix> best_inputs;
  // Optimal observables on the cut spaces (Alexis pair, Bobby pair).
  ComplexMatrix m1, m2, n1, n2;
  // (iteration, value) after each full update cycle, for the best restart.
  std::vector<std::pair<int, double>> value_trace;
  // Iterations at which the state was perturbed; the value may drop right
  // after these and is non-decreasing everywhere else.
  std::vector<int> perturb_events;
  int restart_index = -1;
  bool converged = false;
  std::vector<double> restart_values;
};

// Sign decomposition sum_i sgn(lambda_i) |e_i><e_i| (sgn(0) := +1): the
// dichotomic observable maximizing tr(M F); achieves sum_i |lambda_i|.
DichotomicObservable observable_from_operator(const ComplexMatrix& f);

// Projective variant with equal +1/-1 multiplicities (traceless): +1 on the
// top half of the spectrum. Requires even dimension.
DichotomicObservable balanced_observable_from_operator(const ComplexMatrix& f);

struct ObservableUpdate {
  ComplexMatrix first;
  ComplexMatrix second;
  double objective;
};

// Optimal Alexis pair given Bobby's: diagonalize F_x = Tr_B[(I (x) (N1 +/- N2)) sigma].
ObservableUpdate update_observables_alexis(const ComplexMatrix& sigma_cut, std::size_t dim_a,
                                           std::size_t dim_b, const ComplexMatrix& n1,
                                           const ComplexMatrix& n2, bool balanced = false);

// Optimal Bobby pair given Alexis's: diagonalize G1 +/- G2 with
// G_x = Tr_A[(M_x (x) I) sigma].
ObservableUpdate update_observables_bobby(const ComplexMatrix& sigma_cut, std::size_t dim_a,
                                          std::size_t dim_b, const ComplexMatrix& m1,
                                          const ComplexMatrix& m2, bool balanced = false);

struct StateUpdate {
  PureState state;
  double objective;  // top eigenvalue of the adjoint-lifted Bell operator
};

// Best two-qubit input for a single-channel run: top eigenvector of
// (id (x) ch^adj)(B).
StateUpdate update_state_single(const BellOperator& bell, const KrausChannel& ch);

// Best four-qubit input for a unidirectional run: top eigenvector of
// (id (x) ch1^adj (x) id (x) ch2^adj)(B), with B given on the cut ordering
// (A, A', B, B') and reordered internally to the output layout.
StateUpdate update_state_unidirectional(const BellOperator& bell, const KrausChannel& ch1,
                                        const KrausChannel& ch2);

// Best two-qubit input for one bidirectional factor, the other factor's
// channel output held fixed. `update_first` selects which factor moves.
StateUpdate update_state_bidirectional(const BellOperator& bell, const KrausChannel& ch1,
                                       const KrausChannel& ch2, const ComplexMatrix& other_output,
                                       bool update_first);

// (1 - epsilon) rho + epsilon rho_star.
ComplexMatrix perturb(const ComplexMatrix& rho, const ComplexMatrix& rho_star, double epsilon);

// Random restart state for stalled runs: a Schmidt pure state (parameter
// drawn uniformly) conjugated by a Haar-random unitary on the full space.
ComplexMatrix make_perturbation_state(const std::vector<std::size_t>& dims, Rng& rng);

// Alternating see-saw over inputs and observables; restarts run with derived
// seeds (seed + restart index) and merge by best value.
SeesawResult run_seesaw(const ProtocolDescriptor& protocol, const KrausChannel& ch1,
                        const KrausChannel& ch2, const SeesawConfig& config);

// Maximal CHSH value of a fixed two-qubit state over projective qubit
// observables, by alternating Bloch-vector updates on the correlation
// matrix. Converges to horodecki_value for generic states.
double max_chsh_two_qubit(const DensityMatrix& rho, int restarts = 4, int iterations = 500,
                          std::uint64_t seed = 1);

}  // namespace qchsh

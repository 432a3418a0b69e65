#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qchsh/channels.hpp"
#include "qchsh/matrix.hpp"
#include "test_util.hpp"

using namespace qchsh;
using test::phi_plus;

namespace {

const std::vector<ChannelFamily> kFamilies = {
    ChannelFamily::Depolarizing, ChannelFamily::AmplitudeDamping, ChannelFamily::Loss,
    ChannelFamily::Erasure};

ComplexMatrix half_identity(std::size_t n) {
  ComplexMatrix m = ComplexMatrix::identity(n);
  m *= cplx{1.0 / static_cast<double>(n), 0.0};
  return m;
}

}  // namespace

TEST_CASE("p=1 makes every family act as the identity on its qubit input") {
  Rng rng(3);
  for (ChannelFamily family : kFamilies) {
    const KrausChannel ch = make_channel(make_param(family, 1.0));
    for (int i = 0; i < 5; ++i) {
      const DensityMatrix rho = random_density_matrix({2, 2}, rng);
      const DensityMatrix out = apply(ch, rho, 1);
      if (family == ChannelFamily::Erasure) {
        // identity on the qubit subspace, no weight on the flag level
        for (std::size_t r = 0; r < 2; ++r) {
          for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t rr = 0; rr < 2; ++rr) {
              for (std::size_t cc = 0; cc < 2; ++cc) {
                CHECK(std::abs(out.matrix()(3 * r + rr, 3 * c + cc) -
                               rho.matrix()(2 * r + rr, 2 * c + cc)) < 1e-10);
              }
            }
          }
        }
        for (std::size_t r = 0; r < 6; r += 3) {
          CHECK(std::abs(out.matrix()(r + 2, r + 2)) < 1e-10);
        }
      } else {
        CHECK(out.matrix().approx_equal(rho.matrix(), 1e-10));
      }
    }
  }
}

TEST_CASE("depolarizing output mixes the input with the marginal") {
  const double p = 0.5;
  const KrausChannel ch = make_depolarizing(p);
  const DensityMatrix rho = DensityMatrix::from_pure(phi_plus());
  const DensityMatrix out = apply(ch, rho, 1);

  const ComplexMatrix marginal = ptrace(rho.matrix(), {2, 2}, {0});
  ComplexMatrix expected = rho.matrix();
  expected *= cplx{p, 0.0};
  ComplexMatrix tail = tensor_product(marginal, half_identity(2));
  tail *= cplx{1.0 - p, 0.0};
  expected += tail;
  CHECK(out.matrix().approx_equal(expected, 1e-12));
}

TEST_CASE("depolarizing Kraus set is complete at p = 1/sqrt(2)") {
  const KrausChannel ch = make_depolarizing(1.0 / std::sqrt(2.0));
  ComplexMatrix sum(2, 2);
  for (const auto& e : ch.kraus()) sum += e.adjoint() * e;
  CHECK(sum.approx_equal(ComplexMatrix::identity(2), 1e-10));
}

TEST_CASE("full amplitude damping sends everything to |0><0|") {
  Rng rng(5);
  const KrausChannel ch = make_amplitude_damping(0.0);
  for (int i = 0; i < 5; ++i) {
    const DensityMatrix rho = random_density_matrix({2}, rng);
    const DensityMatrix out = apply(ch, rho, 0);
    CHECK(std::abs(out.matrix()(0, 0) - cplx{1.0, 0.0}) < 1e-12);
  }
}

TEST_CASE("amplitude damping Bloch form is diag(sqrt(p), sqrt(p), p) with shift 1-p") {
  const double p = 0.36;
  const AffineRep rep = affine_rep(make_amplitude_damping(p));
  CHECK(rep.lambda[0][0] == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(rep.lambda[1][1] == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(rep.lambda[2][2] == doctest::Approx(0.36).epsilon(1e-10));
  CHECK(std::abs(rep.shift[0]) < 1e-10);
  CHECK(std::abs(rep.shift[1]) < 1e-10);
  CHECK(rep.shift[2] == doctest::Approx(0.64).epsilon(1e-10));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r != c) CHECK(std::abs(rep.lambda[r][c]) < 1e-10);
    }
  }
}

TEST_CASE("loss channel decomposes as transmit-or-reset") {
  Rng rng(7);
  const double p = 0.5;
  const KrausChannel ch = make_loss(p);

  // p = 0 resets everything
  const DensityMatrix reset = apply(make_loss(0.0), random_density_matrix({2}, rng), 0);
  CHECK(std::abs(reset.matrix()(0, 0) - cplx{1.0, 0.0}) < 1e-12);

  const DensityMatrix rho = random_density_matrix({2, 2}, rng);
  const DensityMatrix out = apply(ch, rho, 1);
  ComplexMatrix expected = rho.matrix();
  expected *= cplx{p, 0.0};
  const ComplexMatrix marginal = ptrace(rho.matrix(), {2, 2}, {0});
  ComplexMatrix reset_part = tensor_product(marginal, outer(basis_ket(2, 0), basis_ket(2, 0)));
  reset_part *= cplx{1.0 - p, 0.0};
  expected += reset_part;
  CHECK(out.matrix().approx_equal(expected, 1e-12));
}

TEST_CASE("loss Bloch form is diag(p, p, p) with shift 1-p") {
  const double p = 0.37;
  const AffineRep rep = affine_rep(make_loss(p));
  for (int i = 0; i < 3; ++i) CHECK(rep.lambda[i][i] == doctest::Approx(p).epsilon(1e-10));
  CHECK(rep.shift[2] == doctest::Approx(1.0 - p).epsilon(1e-10));
}

TEST_CASE("erasure mixes the input with the flag state") {
  const double p = 0.5;
  const KrausChannel ch = make_erasure(p);
  CHECK(ch.in_dim() == 2);
  CHECK(ch.out_dim() == 3);

  const DensityMatrix rho = DensityMatrix::from_pure(phi_plus());
  const DensityMatrix out = apply(ch, rho, 1);
  CHECK(out.dims() == std::vector<std::size_t>{2, 3});
  CHECK(std::abs(out.matrix().trace() - cplx{1.0, 0.0}) < 1e-10);

  // embed |Phi+><Phi+| into the 2x3 layout, then add the flag branch
  ComplexMatrix embed(6, 6);
  const ComplexMatrix phi = rho.matrix();
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t rr = 0; rr < 2; ++rr) {
        for (std::size_t cc = 0; cc < 2; ++cc) {
          embed(3 * r + rr, 3 * c + cc) = phi(2 * r + rr, 2 * c + cc);
        }
      }
    }
  }
  embed *= cplx{p, 0.0};
  ComplexMatrix flag = tensor_product(half_identity(2), outer(basis_ket(3, 2), basis_ket(3, 2)));
  flag *= cplx{1.0 - p, 0.0};
  embed += flag;
  CHECK(out.matrix().approx_equal(embed, 1e-12));

  // p = 0 maps everything onto the flag level
  Rng erng(9);
  const DensityMatrix erased = apply(make_erasure(0.0), random_density_matrix({2}, erng), 0);
  CHECK(std::abs(erased.matrix()(2, 2) - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("apply with a fully depolarizing channel yields product of marginals") {
  const DensityMatrix rho = DensityMatrix::from_pure(phi_plus());
  const DensityMatrix out = apply(make_depolarizing(0.0), rho, 1);
  CHECK(out.matrix().approx_equal(tensor_product(half_identity(2), half_identity(2)), 1e-12));
}

TEST_CASE("apply validates the target dimension") {
  Rng rng(11);
  const DensityMatrix rho = random_density_matrix({3}, rng);
  CHECK_THROWS_AS(apply(make_depolarizing(0.5), rho, 0), dimension_error);
}

TEST_CASE("channel parameters are range-checked") {
  CHECK_THROWS_AS(make_depolarizing(-0.1), parameter_error);
  CHECK_THROWS_AS(make_amplitude_damping(1.1), parameter_error);
  CHECK_THROWS_AS(make_loss(2.0), parameter_error);
  CHECK_THROWS_AS(make_erasure(-1e-9), parameter_error);
}

TEST_CASE("Kraus constructor rejects incomplete operator sets") {
  ComplexMatrix half = ComplexMatrix::identity(2);
  half *= cplx{0.5, 0.0};
  CHECK_THROWS_AS(KrausChannel(2, 2, {half}, "bad"), contract_error);
}

TEST_CASE("adjoint of the depolarizing channel scales sz by p") {
  const double p = 0.7;
  const ComplexMatrix back = adjoint_apply(make_depolarizing(p), pauli_z(), {2}, 0);
  ComplexMatrix expected = pauli_z();
  expected *= cplx{p, 0.0};
  CHECK(back.approx_equal(expected, 1e-12));

  const ComplexMatrix same = adjoint_apply(make_identity(2), pauli_x(), {2}, 0);
  CHECK(same.approx_equal(pauli_x(), 1e-14));
}

TEST_CASE("Heisenberg-Schroedinger duality holds for random triples") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const ChannelFamily family = kFamilies[i % kFamilies.size()];
    const KrausChannel ch = make_channel(make_param(family, rng.uniform()));
    const DensityMatrix rho = random_density_matrix({2, 2}, rng);
    const ComplexMatrix obs = test::random_hermitian(2 * ch.out_dim(), rng);

    const DensityMatrix out = apply(ch, rho, 1);
    const cplx lhs = (obs * out.matrix()).trace();
    const ComplexMatrix pulled = adjoint_apply(ch, obs, {2, ch.out_dim()}, 1);
    const cplx rhs = (pulled * rho.matrix()).trace();
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("depolarizing Bloch form is an isotropic contraction") {
  const double p = 0.41;
  const AffineRep rep = affine_rep(make_depolarizing(p));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(rep.lambda[r][c] - (r == c ? p : 0.0)) < 1e-10);
    }
    CHECK(std::abs(rep.shift[r]) < 1e-10);
  }
}

TEST_CASE("Bloch-picture action matches the Kraus picture on random states") {
  Rng rng(17);
  std::vector<KrausChannel> channels;
  channels.push_back(make_depolarizing(0.63));
  channels.push_back(make_amplitude_damping(0.5));
  channels.push_back(make_loss(0.8));
  channels.push_back(random_unital_qubit_channel(rng));
  for (const KrausChannel& ch : channels) {
    const AffineRep rep = affine_rep(ch);
    for (int i = 0; i < 100; ++i) {
      const DensityMatrix rho = random_density_matrix({2}, rng);
      const DensityMatrix via_kraus = apply(ch, rho, 0);
      const DensityMatrix via_bloch = affine_apply(rep, rho);
      CHECK(via_kraus.matrix().approx_equal(via_bloch.matrix(), 1e-8));
    }
  }
}

TEST_CASE("unitality matches the family structure") {
  CHECK(is_unital(make_depolarizing(0.2)));
  CHECK(is_unital(make_depolarizing(0.9)));
  CHECK_FALSE(is_unital(make_amplitude_damping(0.5)));
  CHECK(is_unital(make_loss(1.0)));
  Rng rng(19);
  CHECK(is_unital(random_unital_qubit_channel(rng)));
}

TEST_CASE("entanglement breaking is decided by the Choi partial transpose") {
  CHECK(is_entanglement_breaking_qubit(make_depolarizing(1.0 / 3.0)));
  CHECK_FALSE(is_entanglement_breaking_qubit(make_depolarizing(0.5)));
  CHECK_FALSE(is_entanglement_breaking_qubit(make_identity(2)));
}

TEST_CASE("channel equality compares maps, not Kraus lists") {
  CHECK(channels_approx_equal(make_channel(make_param(ChannelFamily::Depolarizing, 1.0)),
                              make_identity(2)));
  CHECK_FALSE(channels_approx_equal(make_depolarizing(0.5), make_depolarizing(0.6)));
}

TEST_CASE("channel specs parse and round-trip") {
  const ChannelParam p = parse_channel_spec("ad:0.5");
  CHECK(p.family == ChannelFamily::AmplitudeDamping);
  CHECK(p.p == 0.5);
  CHECK(spec_string(p) == "ad:0.5");

  const ChannelParam fine = make_param(ChannelFamily::Depolarizing, 1.0 / std::sqrt(2.0));
  CHECK(parse_channel_spec(spec_string(fine)) == fine);

  CHECK_THROWS_AS(parse_channel_spec("ad"), parameter_error);
  CHECK_THROWS_AS(parse_channel_spec("zz:0.5"), parameter_error);
  CHECK_THROWS_AS(parse_channel_spec("ad:abc"), parameter_error);
  CHECK_THROWS_AS(parse_channel_spec("ad:1.5"), parameter_error);
  CHECK_THROWS_AS(parse_channel_spec("ad:-0.25"), parameter_error);
}

TEST_CASE("outputs stay valid density matrices across the parameter range") {
  Rng rng(23);
  for (ChannelFamily family : kFamilies) {
    for (int i = 0; i < 20; ++i) {
      const KrausChannel ch = make_channel(make_param(family, rng.uniform()));
      const DensityMatrix rho = random_density_matrix({2, 2}, rng);
      const DensityMatrix out = apply(ch, rho, 1);
      // revalidate from scratch: Hermitian, unit trace, positive
      CHECK_NOTHROW(DensityMatrix(out.dims(), out.matrix()));
    }
  }
}

TEST_CASE("random unital qubit channels are honest CPTP maps") {
  Rng rng(29);
  for (int i = 0; i < 10; ++i) {
    const KrausChannel ch = random_unital_qubit_channel(rng);
    ComplexMatrix sum(2, 2);
    for (const auto& e : ch.kraus()) sum += e.adjoint() * e;
    CHECK(sum.approx_equal(ComplexMatrix::identity(2), 1e-10));
    const EigResult eig = hermitian_eig(ch.choi());
    CHECK(eig.values.back() > -1e-8);
  }
}

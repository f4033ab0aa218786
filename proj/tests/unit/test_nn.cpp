#include "doctest.h"

#include "../common/gradcheck.hpp"

#include "dcrl/nn/adam.hpp"
#include "dcrl/nn/checkpoint.hpp"
#include "dcrl/nn/dense.hpp"
#include "dcrl/nn/gru.hpp"

using namespace dcrl;
using namespace dcrl::nn;

TEST_CASE("dense stack gradients match finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) CHECK(gradcheck::dense_check(seed) < 1e-4);
}

TEST_CASE("GRU BPTT gradients match finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) CHECK(gradcheck::gru_check(seed) < 1e-4);
}

TEST_CASE("joint encoder and Q-head gradients match finite differences") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) CHECK(gradcheck::e2e_check(seed) < 1e-4);
}

TEST_CASE("zero GRU weights halve the hidden state") {
  const GruCell<double> cell(3, 2);
  VectorXr h0(2);
  h0 << 0.8, -0.4;
  const MatrixXr s = gru_sequence(cell, MatrixXr::Ones(3, 1).eval(), h0);
  CHECK(s(0, 1) == doctest::Approx(0.4));
  CHECK(s(1, 1) == doctest::Approx(-0.2));
}

TEST_CASE("GRU output depends on input order") {
  Rng rng(3);
  const auto cell = GruCell<double>::random(2, 3, rng);
  MatrixXr x(2, 3);
  x << 1, 0, -1, 0.5, 2, 0;
  const VectorXr h0 = VectorXr::Zero(3);
  const MatrixXr fwd = gru_sequence(cell, x, h0);
  const MatrixXr rev = gru_sequence(cell, MatrixXr(x.rowwise().reverse()), h0);
  CHECK((fwd.col(3) - rev.col(3)).norm() > 1e-6);
}

TEST_CASE("dense forward rejects a wrong input width") {
  const DenseStack<double> net(3, {1}, {Activation::Identity});
  CHECK_THROWS(dense_forward(net, MatrixXr::Zero(4, 1).eval()));
}

TEST_CASE("first Adam step moves each parameter by the learning rate against its gradient sign") {
  DenseStack<double> net(2, {1}, {Activation::Identity});
  auto grad = net.zeros_like();
  grad.layers()[0].weight << 3.0, -0.5;
  grad.layers()[0].bias << 0.0;
  AdamState<double> adam(net, {0.01});
  adam_step(adam, net, grad);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(net.layers()[0].weight(0, 1) == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(net.layers()[0].bias[0] == 0.0);
}

TEST_CASE("checkpoint round trip is exact") {
  Rng rng(9);
  auto net = DenseStack<double>::random(4, {3, 1}, {Activation::ReLU, Activation::Identity}, rng);
  auto cell = GruCell<double>::random(2, 3, rng);
  Checkpoint ck;
  ck.meta()["note"] = "x";
  ck.add("head", net);
  ck.add("gru", cell);
  const auto back = Checkpoint::parse(ck.serialize());
  auto net2 = net.zeros_like();
  auto cell2 = cell.zeros_like();
  back.restore("head", net2);
  back.restore("gru", cell2);
  CHECK(net2 == net);
  CHECK(cell2 == cell);
  CHECK(back.meta()["note"] == "x");
  auto wrong = DenseStack<double>(5, {3, 1}, {Activation::ReLU, Activation::Identity});
  CHECK_THROWS(back.restore("head", wrong));
}

// test_quantum_oracle.cpp — closed-form two-level propagation and its
// equivalence with the classical conjugate-variable flow.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tlsmap/geometry.hpp"
#include "tlsmap/quantum_oracle.hpp"
#include "tlsmap/random.hpp"

using namespace tlsmap;

namespace {

IntegratorConfig window(double tf) {
    IntegratorConfig c;
    c.tf = tf;
    return c;
}

} // namespace

TEST(Propagate, RabiOscillation) {
    const auto h = QuantumTls::classical_correspondence({1.0, 0.0});
    for (double t : {0.0, 0.3, 1.0, 2.5, 7.0}) {
        const auto s = propagate(h, {1.0, 0.0}, t);
        EXPECT_NEAR(std::norm(s.a1), std::cos(t) * std::cos(t), 1e-14);
        EXPECT_NEAR(std::norm(s.a1) - std::norm(s.a2), std::cos(2 * t), 1e-14);
    }
}

TEST(Propagate, DiagonalHamiltonianKeepsPopulations) {
    const auto h = QuantumTls::classical_correspondence({0.0, 1.0});
    const ComplexAmplitudePair s0{std::sqrt(0.3), std::polar(std::sqrt(0.7), 0.4)};
    for (double t : {0.5, 3.0, 11.0}) {
        const auto s = propagate(h, s0, t);
        EXPECT_NEAR(std::norm(s.a1), 0.3, 1e-14);
    }
}

TEST(Propagate, ZeroTimeIsIdentity) {
    const auto h = QuantumTls::from_pauli({0.7, -0.4});
    const ComplexAmplitudePair s0{std::polar(0.6, 1.0), std::polar(0.8, -0.3)};
    const auto s = propagate(h, s0, 0.0);
    EXPECT_EQ(s.a1, s0.a1);
    EXPECT_EQ(s.a2, s0.a2);
}

TEST(Propagate, UnitarityAndComposition) {
    CounterStream rng(31, 0);
    for (int i = 0; i < 500; ++i) {
        const QuantumTls h(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        const double z = rng.uniform(-1, 1);
        const ComplexAmplitudePair s0{std::polar(std::sqrt(0.5 * (1 + z)), rng.uniform(0, two_pi)),
                                      std::polar(std::sqrt(0.5 * (1 - z)), rng.uniform(0, two_pi))};
        const double t1 = rng.uniform(0, 50), t2 = rng.uniform(0, 50);
        const auto whole = propagate(h, s0, t1 + t2);
        EXPECT_NEAR(whole.norm_squared(), 1.0, 1e-12);
        const auto split = propagate(h, propagate(h, s0, t1), t2);
        EXPECT_NEAR(std::abs(whole.a1 - split.a1), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(whole.a2 - split.a2), 0.0, 1e-12);
    }
}

TEST(Propagate, TraceIsDiscarded) {
    const QuantumTls h(3.0, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(h.h11(), 1.0);
    EXPECT_DOUBLE_EQ(h.h22(), -1.0);
    EXPECT_DOUBLE_EQ(h.omega(), std::hypot(1.0, 0.5));
}

// The classical energy is -2 <H> for the correspondence matrix.
TEST(Correspondence, EnergyIsMinusTwiceExpectation) {
    CounterStream rng(32, 0);
    for (int i = 0; i < 200; ++i) {
        const TlsParams p{rng.uniform(0, 2), rng.uniform(-1, 1)};
        const ConjugatePair c(rng.uniform(-1, 1), rng.uniform(0, two_pi));
        const double e = QuantumTls::classical_correspondence(p).expectation(conjugate_to_amplitudes(c));
        EXPECT_NEAR(isolated_energy(p, c), -2.0 * e, 1e-13);
    }
}

TEST(Correspondence, PhaseGrowsAtTwiceEpsilon) {
    const CorrespondenceExtractor q({0.0, 1.0}, conjugate_to_amplitudes({0.2, 0.1}));
    for (double t : {0.5, 1.0, 2.0}) {
        EXPECT_NEAR(std::remainder(q.at(t).phi() - (0.1 + 2.0 * t), two_pi), 0.0, 1e-12);
        EXPECT_NEAR(q.z(t), 0.2, 1e-14);
    }
}

TEST(CompareIsolated, Examples) {
    EXPECT_LT(compare_isolated({1.0, 0.0}, {0.5, 0.3}, window(10.0)), 1e-8);
    EXPECT_LT(compare_isolated({1.0, 1.0}, {0.9, 1.0}, window(10.0)), 1e-6);
    EXPECT_LT(compare_isolated({1.0, 0.0}, {0.0, 0.0}, window(10.0)), 1e-15);
    EXPECT_THROW(compare_isolated({1.0, 0.0}, {1.0, 0.0}, window(10.0)), DomainError);
}

TEST(CompareIsolated, ParameterGrid) {
    CounterStream rng(33, 0);
    for (double delta : {0.5, 1.0, 2.0}) {
        for (double eps : {0.0, 0.5, 1.0}) {
            for (int k = 0; k < 5; ++k) {
                const ConjugatePair ic(rng.uniform(-0.99, 0.99), rng.uniform(0, two_pi));
                EXPECT_LT(compare_isolated({delta, eps}, ic, window(10.0)), 1e-6)
                    << "delta " << delta << " eps " << eps << " z " << ic.z() << " phi " << ic.phi();
            }
        }
    }
}

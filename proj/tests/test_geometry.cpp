// test_geometry.cpp — Hopf projection, conjugate coordinates, MMST energy,
// mixing angle and L/R basis rotation.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tlsmap/geometry.hpp"
#include "tlsmap/hamiltonians.hpp"
#include "tlsmap/random.hpp"

using namespace tlsmap;

namespace {

constexpr double pi = std::numbers::pi;
constexpr int property_cases = 10000;

ComplexAmplitudePair random_state(CounterStream& rng, double floor = 0.0) {
    for (;;) {
        const double z = rng.uniform(-1.0, 1.0);
        const double p1 = std::sqrt(0.5 * (1.0 + z));
        const double p2 = std::sqrt(0.5 * (1.0 - z));
        if (p1 < floor || p2 < floor) continue;
        return {std::polar(p1, rng.uniform(0.0, two_pi)), std::polar(p2, rng.uniform(0.0, two_pi))};
    }
}

void expect_bloch_near(const BlochVector& a, const BlochVector& b, double tol) {
    EXPECT_NEAR(a.x, b.x, tol);
    EXPECT_NEAR(a.y, b.y, tol);
    EXPECT_NEAR(a.z, b.z, tol);
}

} // namespace

TEST(HopfProject, BasisStateMapsToPole) {
    expect_bloch_near(hopf_project({1.0, 0.0}), {0, 0, 1}, 1e-15);
}

TEST(HopfProject, EqualSuperpositions) {
    const double s = 1.0 / std::sqrt(2.0);
    expect_bloch_near(hopf_project({s, s}), {1, 0, 0}, 1e-15);
    expect_bloch_near(hopf_project({s, complex(0.0, s)}), {0, 1, 0}, 1e-15);
}

TEST(HopfProject, RejectsUnnormalizedInput) {
    EXPECT_THROW(hopf_project({1.0, 1.0}), DomainError);
    EXPECT_THROW(hopf_project({0.5, 0.0}), DomainError);
}

TEST(HopfProject, GlobalPhaseInvariance) {
    CounterStream rng(11, 0);
    for (int i = 0; i < property_cases; ++i) {
        const auto s = random_state(rng);
        const complex g = std::polar(1.0, rng.uniform(0.0, two_pi));
        expect_bloch_near(hopf_project({g * s.a1, g * s.a2}), hopf_project(s), 1e-12);
    }
}

TEST(HopfProject, UnitNorm) {
    CounterStream rng(12, 0);
    for (int i = 0; i < property_cases; ++i) {
        EXPECT_NEAR(hopf_project(random_state(rng)).norm(), 1.0, 1e-12);
    }
}

TEST(AmplitudesToConjugate, Examples) {
    const double s = 1.0 / std::sqrt(2.0);
    const auto a = amplitudes_to_conjugate({s, s});
    EXPECT_NEAR(a.z(), 0.0, 1e-15);
    EXPECT_NEAR(a.phi(), 0.0, 1e-15);

    const auto b = amplitudes_to_conjugate({s, std::polar(s, pi / 3)});
    EXPECT_NEAR(b.z(), 0.0, 1e-15);
    EXPECT_NEAR(b.phi(), two_pi - pi / 3, 1e-14);

    const auto c = amplitudes_to_conjugate({std::sqrt(0.9), std::sqrt(0.1)});
    EXPECT_NEAR(c.z(), 0.8, 1e-15);
    EXPECT_NEAR(c.phi(), 0.0, 1e-15);
}

TEST(AmplitudesToConjugate, VanishingAmplitudeHasNoPhase) {
    EXPECT_THROW(amplitudes_to_conjugate({1.0, 0.0}), UndefinedError);
    EXPECT_THROW(amplitudes_to_conjugate({0.0, complex(0.0, 1.0)}), UndefinedError);
}

TEST(ConjugateToBloch, Examples) {
    expect_bloch_near(conjugate_to_bloch({1.0, 2.7}), {0, 0, 1}, 1e-15);
    expect_bloch_near(conjugate_to_bloch({0.0, 0.0}), {1, 0, 0}, 1e-15);
    expect_bloch_near(conjugate_to_bloch({0.6, pi / 2}), {0, 0.8, 0.6}, 1e-15);
}

TEST(ConjugatePair, RejectsOutOfDomain) {
    EXPECT_THROW(ConjugatePair(1.5, 0.0), DomainError);
    EXPECT_THROW(ConjugatePair(0.0, std::nan("")), DomainError);
    EXPECT_NO_THROW(ConjugatePair(-1.0, 0.0));
}

TEST(ConjugatePair, PhaseIsWrapped) {
    EXPECT_NEAR(ConjugatePair(0.0, -pi / 2).phi(), 1.5 * pi, 1e-15);
    EXPECT_NEAR(ConjugatePair(0.0, 5 * pi).phi(), pi, 1e-14);
}

// phi = arg(a1) - arg(a2) and Y = 2 Im(conj(a1) a2) have opposite
// orientation, so the two routes to the sphere agree up to Y -> -Y.
TEST(ConjugateRoundTrip, BlochRoutesAgreeUpToOrientation) {
    CounterStream rng(13, 0);
    for (int i = 0; i < property_cases; ++i) {
        const auto s = random_state(rng, 1e-6);
        const BlochVector h = hopf_project(s);
        const BlochVector c = conjugate_to_bloch(amplitudes_to_conjugate(s));
        expect_bloch_near(c, {h.x, -h.y, h.z}, 1e-12);
    }
}

TEST(ConjugateRoundTrip, ConjugateAmplitudeConjugate) {
    CounterStream rng(14, 0);
    for (int i = 0; i < property_cases; ++i) {
        const ConjugatePair c(rng.uniform(-0.999999, 0.999999), rng.uniform(0.0, two_pi));
        const auto s = conjugate_to_amplitudes(c);
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
        const ConjugatePair back = amplitudes_to_conjugate(s);
        EXPECT_NEAR(back.z(), c.z(), 1e-12);
        EXPECT_NEAR(std::remainder(back.phi() - c.phi(), two_pi), 0.0, 1e-12);
    }
}

TEST(MmstEnergy, Examples) {
    EXPECT_NEAR(mmst_energy({1, 0, 0}, {0.0, 0.0}), -2.0, 1e-15);
    EXPECT_NEAR(mmst_energy({0, 0, 0.7}, {1.0, 1.3}), 1.4, 1e-15);
}

TEST(MmstEnergy, MatchesIsolatedEnergy) {
    CounterStream rng(15, 0);
    for (int i = 0; i < 1000; ++i) {
        const TlsParams p{rng.uniform(0.0, 3.0), rng.uniform(-2.0, 2.0)};
        const ConjugatePair c(rng.uniform(-1.0, 1.0), rng.uniform(0.0, two_pi));
        EXPECT_NEAR(mmst_energy({p.delta, 0.0, p.epsilon}, c), isolated_energy(p, c), 1e-14);
    }
}

TEST(MixingAngle, Examples) {
    EXPECT_NEAR(mixing_angle({1.0, 0.0}).theta, pi / 4, 1e-15);
    EXPECT_NEAR(mixing_angle({1.0, 1.0}).theta, pi / 8, 1e-15);
    EXPECT_NEAR(mixing_angle({0.0, 1.0}).theta, 0.0, 1e-15);
    EXPECT_THROW(mixing_angle({0.0, 0.0}), UndefinedError);
}

TEST(MixingAngle, SatisfiesDefiningRelation) {
    CounterStream rng(16, 0);
    for (int i = 0; i < 1000; ++i) {
        const TlsParams p{rng.uniform(0.0, 5.0), rng.uniform(0.1, 5.0) * (i % 2 ? 1.0 : -1.0)};
        const double theta = mixing_angle(p).theta;
        EXPECT_GE(theta, 0.0);
        EXPECT_LT(theta, pi / 2);
        EXPECT_NEAR(std::tan(2 * theta) * p.epsilon, p.delta, 1e-12 * std::max(1.0, p.delta));
    }
}

TEST(LrTransform, Examples) {
    const auto a = lr_transform({pi / 4}, {1.0, 0.0});
    EXPECT_NEAR(std::abs(a.a1 - 1 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a.a2 - 1 / std::sqrt(2.0)), 0.0, 1e-15);

    const complex u(0.6, 0.0), v(0.0, 0.8);
    const auto b = lr_transform({0.0}, {u, v});
    EXPECT_NEAR(std::abs(b.a1 - v), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(b.a2 - u), 0.0, 1e-15);
}

TEST(LrTransform, InvolutionAndNorm) {
    CounterStream rng(17, 0);
    for (int i = 0; i < property_cases; ++i) {
        const BasisRotation rot{rng.uniform(0.0, pi / 2)};
        const auto s = random_state(rng);
        const auto once = lr_transform(rot, s);
        EXPECT_NEAR(once.norm_squared(), 1.0, 1e-12);
        const auto twice = lr_transform(rot, once);
        EXPECT_NEAR(std::abs(twice.a1 - s.a1), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(twice.a2 - s.a2), 0.0, 1e-12);
    }
}

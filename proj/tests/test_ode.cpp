#include "diracqed/ode.hpp"

#include "helpers.hpp"

#include <catch_amalgamated.hpp>

using namespace diracqed;
using Catch::Approx;

namespace {

/// Hand-built bath with given couplings and detunings.
ModeSet toy_modeset(const std::vector<double>& g, const std::vector<double>& delta) {
    auto s = testhelpers::fig5_setup();
    ModeSet set{{}, {s.cone, s.emitter, s.system, 1, 1}};
    for (std::size_t i = 0; i < g.size(); ++i) {
        Mode m;
        m.kappa = 1.0;
        m.phi = 0.0;
        m.band = 1;
        m.Omega = s.emitter.omega21 + delta[i];
        m.Delta = delta[i];
        m.g = g[i];
        m.weight = 1.0;
        set.modes.push_back(m);
    }
    return set;
}

} // namespace

TEST_CASE("derivative identities") {
    const auto set = toy_modeset({1e10, 2e10, 5e9}, {0.0, 3e10, -2e10});

    SECTION("vacuum is a fixed point") {
        AmplitudeState st;
        st.c1 = 1.0;
        st.c2 = 0.0;
        st.c_modes.assign(3, {0.0, 0.0});
        const auto d = derivative(st, set);
        CHECK(std::abs(d.c1) == 0.0);
        CHECK(std::abs(d.c2) == 0.0);
        for (const auto& c : d.c_modes) CHECK(std::abs(c) == 0.0);
    }
    SECTION("single resonant mode reads off the equation") {
        const auto one = toy_modeset({7e9}, {0.0});
        AmplitudeState st;
        st.c1 = 0.0;
        st.c2 = 1.0;
        st.c_modes.assign(1, {0.0, 0.0});
        const auto d = derivative(st, one);
        CHECK(d.c_modes[0].real() == Approx(7e9));
        CHECK(d.c_modes[0].imag() == Approx(0.0).margin(1e-6));
        CHECK(std::abs(d.c1) == 0.0);
    }
    SECTION("norm is conserved by the flow structure") {
        for (int trial = 0; trial < 25; ++trial) {
            AmplitudeState st;
            st.t = testhelpers::uniform(0.0, 1e-12);
            st.c1 = cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)};
            st.c2 = cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)};
            st.c_modes = {cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)},
                          cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)},
                          cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)}};
            const auto d = derivative(st, set);
            cplx acc = std::conj(st.c2) * d.c2;
            for (std::size_t j = 0; j < 3; ++j) acc += std::conj(st.c_modes[j]) * d.c_modes[j];
            CHECK(std::abs(2.0 * acc.real()) < 1e-16 * 2e10 * 6.0);
        }
    }
    SECTION("dimension mismatch") {
        AmplitudeState st;
        st.c_modes.assign(2, {0.0, 0.0});
        CHECK_THROWS_AS(derivative(st, set), std::invalid_argument);
    }
}

TEST_CASE("ground-state emitter stays dark") {
    const auto set = toy_modeset({1e10, 2e10}, {0.0, 1e10});
    const auto traj = evolve({0.0, 0.0}, set, 1e-9, 1e-9, 101);
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        CHECK(std::abs(traj.c2[i]) == 0.0);
        CHECK(traj.entropy_bits[i] == Approx(0.0).margin(1e-12));
        CHECK(traj.c1[i] == cplx{1.0, 0.0}); // bitwise constant
    }
}

TEST_CASE("single resonant mode undergoes vacuum Rabi oscillation") {
    const double g = 2.0e10;
    const auto set = toy_modeset({g}, {0.0});
    const double T = 5.0 * 2.0 * std::numbers::pi / g;
    const auto traj = evolve({std::numbers::pi / 2.0, 0.0}, set, T, 1e-11, 800);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        worst = std::max(worst, std::abs(std::abs(traj.c2[i]) - std::abs(std::cos(g * traj.t[i]))));
    }
    CHECK(worst < 1e-6);
    CHECK(traj.max_norm_drift < 1e-6);
}

TEST_CASE("superposition initial state keeps c1 bitwise constant") {
    const auto set = toy_modeset({1e10, 8e9}, {2e9, -3e9});
    const InitialState init{std::numbers::pi / 4.0, 0.3};
    const auto traj = evolve(init, set, 2e-9, 1e-9, 301);
    const cplx c1_0 = init.to_state(2).c1;
    for (const auto& c1 : traj.c1) CHECK(c1 == c1_0);
}

TEST_CASE("time reversal recovers the initial state") {
    const auto s = testhelpers::fig5_setup();
    const auto set = build_mode_set(s.cone, s.lattice, s.emitter, s.system,
                                    AngularProfile::constant(), 20, 8);
    const double g_coll = std::sqrt(set.coupling_sq_sum());
    const double T = 1.5 * 2.0 * std::numbers::pi / g_coll;

    AmplitudeState state = InitialState{std::numbers::pi / 2.0, 0.0}.to_state(set.modes.size());
    evolve_between(state, set, T, 1e-10);
    evolve_between(state, set, 0.0, 1e-10); // integrate back
    CHECK(std::abs(state.c2 - cplx{1.0, 0.0}) < 1e-5);
    double field = 0.0;
    for (const auto& c : state.c_modes) field += std::norm(c);
    CHECK(field < 1e-8);
}

TEST_CASE("tolerance refinement converges monotonically") {
    const auto s = testhelpers::fig5_setup();
    const auto set = build_mode_set(s.cone, s.lattice, s.emitter, s.system,
                                    AngularProfile::constant(), 30, 8);
    const double g_coll = std::sqrt(set.coupling_sq_sum());
    const double T = 2.0 * 2.0 * std::numbers::pi / g_coll;

    auto endpoint = [&](double tol) {
        AmplitudeState st = InitialState{std::numbers::pi / 2.0, 0.0}.to_state(set.modes.size());
        evolve_between(st, set, T, tol, tol * 1e-3);
        return st.c2;
    };
    const cplx ref = endpoint(1e-12);
    const double e6 = std::abs(endpoint(1e-6) - ref);
    const double e8 = std::abs(endpoint(1e-8) - ref);
    const double e10 = std::abs(endpoint(1e-10) - ref);
    CHECK(e8 <= e6);
    CHECK(e10 <= e8);
}

TEST_CASE("step-size collapse raises an integration error") {
    const auto set = toy_modeset({1e25}, {0.0});
    CHECK_THROWS_AS(evolve({std::numbers::pi / 2.0, 0.0}, set, 1.0, 1e-9, 10), IntegrationError);
}

TEST_CASE("entanglement entropy") {
    SECTION("product states carry no entropy") {
        AmplitudeState st;
        st.c1 = std::sqrt(0.5);
        st.c2 = std::sqrt(0.5);
        st.c_modes.assign(4, {0.0, 0.0});
        CHECK(entanglement_entropy(st) == Approx(0.0).margin(1e-12));
    }
    SECTION("half-transferred population with no coherence is maximally mixed") {
        AmplitudeState st;
        st.c1 = 0.0;
        st.c2 = std::sqrt(0.5);
        st.c_modes.assign(1, cplx{std::sqrt(0.5), 0.0});
        CHECK(entanglement_entropy(st) == Approx(1.0).epsilon(1e-12));
    }
    SECTION("eigenvalues {0.9, 0.1} against the scalar entropy oracle") {
        AmplitudeState st;
        st.c1 = 0.0;
        st.c2 = std::sqrt(0.9);
        st.c_modes.assign(1, cplx{std::sqrt(0.1), 0.0});
        const double oracle = -(0.9 * std::log2(0.9) + 0.1 * std::log2(0.1));
        CHECK(entanglement_entropy(st) == Approx(oracle).epsilon(1e-12));
        CHECK(entanglement_entropy(st) == Approx(0.4690).epsilon(1e-3));
    }
    SECTION("norm gate") {
        AmplitudeState st;
        st.c1 = 1.0;
        st.c2 = 0.5;
        st.c_modes.assign(1, {0.0, 0.0});
        CHECK_THROWS_AS(entanglement_entropy(st), StateError);
    }
    SECTION("entropy stays within [0, 1] bits on random normalized states") {
        for (int trial = 0; trial < 100; ++trial) {
            AmplitudeState st;
            st.c1 = cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)};
            st.c2 = cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)};
            st.c_modes = {cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)},
                          cplx{testhelpers::uniform(-1, 1), testhelpers::uniform(-1, 1)}};
            const double n = std::sqrt(st.norm_sq());
            st.c1 /= n;
            st.c2 /= n;
            for (auto& c : st.c_modes) c /= n;
            const double S = entanglement_entropy(st);
            CHECK(S >= 0.0);
            CHECK(S <= 1.0 + 1e-12);
        }
    }
}

#include <doctest.h>

#include <string>

#include "qjump/params.hpp"
#include "test_support.hpp"

using namespace qjump;

namespace {

bool mentions(const std::vector<std::string>& errors, const std::string& field) {
    for (const auto& e : errors)
        if (e.rfind(field, 0) == 0) return true;
    return false;
}

} // namespace

TEST_CASE("validate accepts the reference feedback configuration") {
    CavityParams p;
    p.kappa = 1.0;
    p.eta = 0.5;
    p.beta = {2.0, 0.0};
    p.mode = DriveMode::Feedback;
    CHECK(validate(p).empty());
}

TEST_CASE("validate names each violated field") {
    CavityParams p;
    p.kappa = 0.0;
    CHECK(mentions(validate(p), "kappa"));

    p.kappa = 1.0;
    p.eta = 1.5;
    CHECK(mentions(validate(p), "eta"));

    p.eta = 0.5;
    p.omega = -1.0;
    CHECK(mentions(validate(p), "omega"));

    p.omega = 2.0;
    p.kappa = -3.0;
    p.eta = 7.0;
    const auto errors = validate(p);
    CHECK(errors.size() == 2);
    CHECK(mentions(errors, "kappa"));
    CHECK(mentions(errors, "eta"));

    CHECK_THROWS_AS(ensure_valid(p), std::invalid_argument);
}

TEST_CASE("picture rotation: alpha_S = alpha_I e^{-i omega_cav t}") {
    CavityParams p;
    p.omega_cav = 1.0;

    const CoherentAmplitude a2{{2.0, 0.0}, Picture::Interaction};
    CHECK(to_schrodinger(a2, 0.0, p).value == Complex(2.0, 0.0)); // phase 1 at t = 0

    // omega_cav * t = pi flips the sign
    const auto flipped = to_schrodinger(a2, M_PI, p);
    CHECK(flipped.picture == Picture::Schrodinger);
    CHECK(std::abs(flipped.value - Complex(-2.0, 0.0)) < 1e-15);

    // omega_cav * t = pi/2 multiplies by -i: (1+i)(-i) = 1 - i
    const CoherentAmplitude a{{1.0, 1.0}, Picture::Interaction};
    const Complex direct = Complex(1.0, 1.0) * Complex(0.0, -1.0);
    REQUIRE(direct == Complex(1.0, -1.0));
    CHECK(std::abs(to_schrodinger(a, M_PI / 2.0, p).value - direct) < 1e-15);
}

TEST_CASE("picture conversion rejects the wrong input picture") {
    CavityParams p;
    const CoherentAmplitude s{{1.0, 0.0}, Picture::Schrodinger};
    CHECK_THROWS_AS(to_schrodinger(s, 1.0, p), std::invalid_argument);
    const CoherentAmplitude i{{1.0, 0.0}, Picture::Interaction};
    CHECK_THROWS_AS(to_interaction(i, 1.0, p), std::invalid_argument);
}

TEST_CASE("picture round trip and magnitude preservation") {
    CavityParams p;
    p.omega_cav = 17.3;
    auto gen = test_support::property_rng();
    std::uniform_real_distribution<double> tdist(0.0, 25.0);
    for (int k = 0; k < 500; ++k) {
        const CoherentAmplitude a{test_support::random_complex(gen, 5.0),
                                  Picture::Interaction};
        const double t = tdist(gen);
        const auto s = to_schrodinger(a, t, p);
        CHECK(std::abs(std::abs(s.value) - std::abs(a.value)) <=
              4e-16 * std::abs(a.value));
        const auto back = to_interaction(s, t, p);
        CHECK(back.picture == Picture::Interaction);
        CHECK(std::abs(back.value - a.value) <= 4e-16 * std::abs(a.value));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ibc/model.hpp"

using namespace ibc;

TEST_CASE("canonical compositions validate") {
    CompositionSpec iterated;
    iterated.outer = {ProcessKind::brownian()};
    iterated.inner = InnerClock::of(ProcessKind::brownian());
    CHECK_NOTHROW(validate_spec(iterated));

    CompositionSpec cc2;
    cc2.outer = {ProcessKind::cauchy(), ProcessKind::cauchy()};
    cc2.inner = InnerClock::of(ProcessKind::cauchy());
    CHECK_NOTHROW(validate_spec(cc2));

    CompositionSpec bhc;
    bhc.outer = {ProcessKind::fractional_brownian(0.3)};
    bhc.inner = InnerClock::of(ProcessKind::cauchy());
    CHECK_NOTHROW(validate_spec(bhc));
}

TEST_CASE("parameter ranges are enforced") {
    CompositionSpec s;
    s.outer = {ProcessKind::fractional_brownian(1.2)};
    s.inner = InnerClock::of(ProcessKind::cauchy());
    CHECK_THROWS_AS(validate_spec(s), InvalidParameter);

    s.outer = {ProcessKind::fractional_brownian(0.0)};
    CHECK_THROWS_AS(validate_spec(s), InvalidParameter);

    s.outer = {ProcessKind::cauchy(0.0, -1.0)};
    CHECK_THROWS_AS(validate_spec(s), InvalidParameter);

    s.outer = {ProcessKind::brownian(0.0, 0.0)};
    CHECK_THROWS_AS(validate_spec(s), InvalidParameter);
}

TEST_CASE("unsupported combinations are rejected rather than guessed") {
    CompositionSpec mixed;
    mixed.outer = {ProcessKind::brownian(), ProcessKind::cauchy()};
    mixed.inner = InnerClock::of(ProcessKind::brownian());
    CHECK_THROWS_AS(validate_spec(mixed), UnsupportedComposition);

    CompositionSpec fbm_clock;
    fbm_clock.outer = {ProcessKind::brownian()};
    fbm_clock.inner = InnerClock::of(ProcessKind::fractional_brownian(0.4));
    CHECK_THROWS_AS(validate_spec(fbm_clock), UnsupportedComposition);

    CompositionSpec fbm_over_brownian;
    fbm_over_brownian.outer = {ProcessKind::fractional_brownian(0.3)};
    fbm_over_brownian.inner = InnerClock::of(ProcessKind::brownian());
    CHECK_THROWS_AS(validate_spec(fbm_over_brownian), UnsupportedComposition);

    CompositionSpec shifted_2d;
    shifted_2d.outer = {ProcessKind::cauchy(0.7), ProcessKind::cauchy()};
    shifted_2d.inner = InnerClock::of(ProcessKind::cauchy());
    CHECK_THROWS_AS(validate_spec(shifted_2d), UnsupportedComposition);

    // a drifted clock is confined to the single standard-coordinate case
    CompositionSpec drifted_clock;
    drifted_clock.outer = {ProcessKind::cauchy()};
    drifted_clock.inner = InnerClock::of(ProcessKind::brownian(0.5));
    CHECK_THROWS_AS(validate_spec(drifted_clock), UnsupportedComposition);

    CompositionSpec ok_drifted;
    ok_drifted.outer = {ProcessKind::brownian()};
    ok_drifted.inner = InnerClock::of(ProcessKind::brownian(0.5));
    CHECK_NOTHROW(validate_spec(ok_drifted));
}

TEST_CASE("time scale is confined to Brownian-in-Brownian compositions") {
    CompositionSpec s;
    s.outer = {ProcessKind::brownian(), ProcessKind::brownian()};
    s.inner = InnerClock::of(ProcessKind::brownian());
    s.time_scale = 1.2;
    CHECK_NOTHROW(validate_spec(s));

    s.outer = {ProcessKind::cauchy(), ProcessKind::cauchy()};
    s.inner = InnerClock::of(ProcessKind::brownian());
    CHECK_THROWS_AS(validate_spec(s), UnsupportedComposition);

    s.outer = {ProcessKind::brownian()};
    s.inner = InnerClock::of(ProcessKind::cauchy());
    CHECK_THROWS_AS(validate_spec(s), UnsupportedComposition);

    s.inner = InnerClock::of(ProcessKind::brownian());
    s.time_scale = -1.0;
    CHECK_THROWS_AS(validate_spec(s), InvalidParameter);
}

TEST_CASE("iteration caps are configurable") {
    CompositionSpec s;
    s.outer = {ProcessKind::brownian()};
    s.inner = InnerClock::iterated_brownian(5);
    CHECK_THROWS_AS(validate_spec(s), UnsupportedComposition);
    ValidationLimits wide;
    wide.max_iterated_n = 6;
    CHECK_NOTHROW(validate_spec(s, wide));

    s.inner = InnerClock::frac_time_product(5);
    CHECK_THROWS_AS(validate_spec(s), UnsupportedComposition);
    s.inner = InnerClock::frac_time_product(1);
    CHECK_THROWS_AS(validate_spec(s), InvalidParameter);
}

TEST_CASE("validation is idempotent") {
    CompositionSpec s;
    s.outer = {ProcessKind::brownian(0.5)};
    s.inner = InnerClock::of(ProcessKind::brownian());
    const auto once = validate_spec(s);
    const auto twice = validate_spec(once);
    CHECK(once.outer.size() == twice.outer.size());
    CHECK(once.outer[0].drift == twice.outer[0].drift);
    CHECK(once.time_scale == twice.time_scale);
    CHECK(static_cast<int>(once.inner.kind) == static_cast<int>(twice.inner.kind));
}

TEST_CASE("equation registry round-trips and descriptions are unique") {
    std::set<std::string> tags, descriptions;
    auto all = all_equations();
    auto ids = all_identities();
    all.insert(all.end(), ids.begin(), ids.end());
    CHECK(all.size() == 24);
    for (EquationId id : all) {
        const std::string tag = to_string(id);
        CHECK(equation_from_string(tag) == id);
        CHECK(tags.insert(tag).second);
        CHECK(descriptions.insert(equation_description(id)).second);
    }
    CHECK_THROWS_AS(equation_from_string("E99"), InvalidParameter);
}

TEST_CASE("grids enumerate points outside exclusion bands") {
    Grid g = make_grid_1d(-1.0, 1.0, 5, {{0, 0.0, 0.1}});
    const auto pts = g.included_points();
    CHECK(pts.size() == 4);  // the midpoint 0 is excluded
    CHECK(g.excluded_fraction() == doctest::Approx(0.2));

    Grid g2;
    g2.axes = {{-1.0, 1.0, 3}, {-1.0, 1.0, 3}};
    g2.bands = {{0, 0.0, 0.1}, {1, 0.0, 0.1}};
    CHECK(g2.included_points().size() == 4);  // only the four corners survive

    Grid bad = make_grid_1d(1.0, -1.0, 5);
    CHECK_THROWS_AS(bad.included_points(), InvalidParameter);
}

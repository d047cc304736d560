#include <doctest.h>

#include <functional>
#include <random>

#include "relia/evaluate.hpp"
#include "relia/oracle.hpp"
#include "support/fixtures.hpp"

using namespace relia;
using namespace relia::testing;

namespace {

template <class Scalar>
StateId state(const Model<Scalar>& m, const char* name) {
    return *m.find_state(name);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::MalformedModel;
}

}  // namespace

TEST_CASE("maintenance reduced system") {
    const auto m = validate_model<Rational>(maintenance_raw(regime_a()));
    const auto a = compute_largest_absorbing(m);
    const auto sys = build_reduced_system(m, a, maintenance_policy(m, 1));
    REQUIRE(sys.size() == 3);
    std::size_t pos22 = 0;
    for (std::size_t r = 0; r < sys.size(); ++r)
        if (m.state_name(sys.states[r]) == "(2,2)") pos22 = r;
    CHECK(sys.v_b[pos22] == Rational(1, 16));
    CHECK(sys.p(pos22, pos22) == Rational(1, 4));
    // a repair under c fails outright with 1 - beta0 - beta1, the other machine breaks with alpha1
    for (std::size_t r = 0; r < sys.size(); ++r)
        if (r != pos22) CHECK(sys.v_b[r] == Rational(1, 20));
}

TEST_CASE("1x1 system") {
    ReducedSystem<double> sys{{StateId{1}}, {0.0}, {1.0}};
    const auto x = solve_reduced(sys);
    CHECK(x.values == std::vector<double>{1.0});
    ReducedSystem<Rational> exact{{StateId{1}}, {Rational(1, 2)}, {Rational(1, 2)}};
    CHECK(solve_reduced(exact).values == std::vector<Rational>{Rational(1)});
}

TEST_CASE("singular and out of range systems") {
    ReducedSystem<double> singular{{StateId{1}}, {1.0}, {0.0}};
    CHECK(code_of([&] { (void)solve_reduced(singular); }) == ErrorCode::SingularSystem);
    ReducedSystem<Rational> exact_singular{{StateId{1}}, {Rational(1)}, {Rational(0)}};
    CHECK(code_of([&] { (void)solve_reduced(exact_singular); }) == ErrorCode::SingularSystem);
    ReducedSystem<double> big{{StateId{1}}, {0.5}, {0.9}};
    CHECK(code_of([&] { (void)solve_reduced(big); }) == ErrorCode::OutOfRangeSolution);
}

TEST_CASE("three-state example has no reduced system") {
    const auto m = validate_model<Rational>(example31_raw());
    const auto a = compute_largest_absorbing(m);
    const auto g1 = policy_of(m, {{"s1", "c1"}, {"s2", "c2"}});
    CHECK(code_of([&] { (void)build_reduced_system(m, a, g1); }) == ErrorCode::EmptyGStar);
    const auto g2 = policy_of(m, {{"s1", "d1"}, {"s2", "d2"}});
    CHECK(code_of([&] { (void)build_reduced_system(m, a, g2); }) == ErrorCode::PolicyOutsideClass);
    // in class with G* empty: zero on survivors
    const auto q = evaluate_in_class(m, a, g1);
    CHECK(q.q == std::vector<Rational>{1, 0, 0});
}

TEST_CASE("maintenance f1 values in both modes") {
    const auto exact = validate_model<Rational>(maintenance_raw(regime_a()));
    const auto ea = compute_largest_absorbing(exact);
    double residual = -1;
    const auto q = evaluate_in_class(exact, ea, maintenance_policy(exact, 1), {}, &residual);
    CHECK(q[state(exact, "(1,2)")] == Rational(17, 154));
    CHECK(q[state(exact, "(2,1)")] == Rational(17, 154));
    CHECK(q[state(exact, "(2,2)")] == Rational(37, 308));
    CHECK(q[state(exact, "(0,0)")] == 1);
    CHECK(q[state(exact, "(1,1)")] == 0);
    CHECK(residual == 0.0);
    CHECK(q.reliability(state(exact, "(2,2)")) == Rational(271, 308));

    const auto fm = validate_model<double>(maintenance_raw(regime_a(), Arithmetic::Float));
    const auto fa = compute_largest_absorbing(fm);
    const auto fq = evaluate_in_class(fm, fa, maintenance_policy(fm, 1), {}, &residual);
    CHECK(std::abs(fq[state(fm, "(1,2)")] - 1.7 / 15.4) <= 1e-12);
    CHECK(std::abs(fq[state(fm, "(2,2)")] - 11.1 / 92.4) <= 1e-12);
    CHECK(residual <= 1e-10);

    const auto f2 = evaluate_in_class(exact, ea, maintenance_policy(exact, 2));
    CHECK(f2[state(exact, "(1,2)")] == Rational(97, 814));
    CHECK(f2[state(exact, "(2,1)")] == Rational(249, 1628));
    CHECK(f2[state(exact, "(2,2)")] == Rational(419, 3256));
    const auto f3 = evaluate_in_class(exact, ea, maintenance_policy(exact, 3));
    CHECK(f3[state(exact, "(1,2)")] == Rational(7, 44));
    CHECK(f3[state(exact, "(2,2)")] == Rational(3, 22));
    const auto f4 = evaluate_in_class(exact, ea, maintenance_policy(exact, 4));
    CHECK(f4[state(exact, "(2,1)")] == Rational(97, 814));
    CHECK(f4[state(exact, "(1,2)")] == Rational(249, 1628));
}

TEST_CASE("minimal-solution iteration") {
    const auto m = validate_model<Rational>(example31_raw());
    const auto g2 = policy_of(m, {{"s1", "d1"}, {"s2", "d2"}});
    const auto g1 = policy_of(m, {{"s1", "c1"}, {"s2", "c2"}});
    CHECK(evaluate_policy_pes(m, g2).q.q == std::vector<Rational>{1, 1, 1});
    CHECK(evaluate_policy_pes(m, g1).q.q == std::vector<Rational>{1, 0, 0});

    const auto fm = validate_model<double>(example31_raw(Arithmetic::Float));
    CHECK(evaluate_policy_pes(fm, policy_of(fm, {{"s1", "d1"}, {"s2", "d2"}})).q.q ==
          std::vector<double>{1, 1, 1});

    const auto exact = validate_model<Rational>(maintenance_raw(regime_b()));
    const auto ea = compute_largest_absorbing(exact);
    for (int k = 1; k <= 4; ++k) {
        const auto g = maintenance_policy(exact, k);
        CHECK(evaluate_policy_pes(exact, g).q.q == evaluate_in_class(exact, ea, g).q);
    }
    const auto fmaint = validate_model<double>(maintenance_raw(regime_b(), Arithmetic::Float));
    const auto fa = compute_largest_absorbing(fmaint);
    for (int k = 1; k <= 4; ++k) {
        const auto g = maintenance_policy(fmaint, k);
        const auto pes = evaluate_policy_pes(fmaint, g);
        CHECK(sup_distance(pes.q.q, evaluate_in_class(fmaint, fa, g).q) <= 1e-9);
        CHECK(pes.gap <= 1e-12);
    }
}

TEST_CASE("transient variant: q = 1/2 at the transient state") {
    const auto m = validate_model<Rational>(example31_transient_raw());
    const auto a = compute_largest_absorbing(m);
    CHECK(a.g_star.members() == std::vector<StateId>{state(m, "s3")});
    const auto g = policy_of(m, {{"s1", "c1"}, {"s2", "c2"}});
    CHECK(evaluate_in_class(m, a, g)[state(m, "s3")] == Rational(1, 2));
    CHECK(evaluate_policy_pes(m, g).q[state(m, "s3")] == Rational(1, 2));
}

TEST_CASE("assembly") {
    const auto m = validate_model<Rational>(example31_raw());
    const auto a = compute_largest_absorbing(m);
    GStarValues<Rational> none;
    CHECK(assemble_failure_vector(m, a, none).q == std::vector<Rational>{1, 0, 0});
    GStarValues<Rational> wrong{{StateId{1}}, {Rational(1, 2)}, 0.0};
    CHECK(code_of([&] { (void)assemble_failure_vector(m, a, wrong); }) == ErrorCode::CoverageMismatch);
}

TEST_CASE("property: evaluators agree and give the minimal supersolution") {
    std::mt19937_64 rng(99);
    int in_class = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto raw = random_raw_model(rng);
        const auto fm = validate_model<double>(raw);
        const auto em = validate_model<Rational>(raw);
        const auto a = compute_largest_absorbing(fm);
        const auto g = random_policy(fm, rng);
        const auto ge = StationaryPolicy::create(em, g.choices());
        const auto pes = evaluate_policy_pes(fm, g);
        const auto exact_pes = evaluate_policy_pes(em, ge);
        CHECK(sup_distance(pes.q.q, exact_pes.q.q) <= 1e-9);
        for (std::size_t i = 0; i < fm.num_states(); ++i) {
            CHECK(pes.q.q[i] >= 0.0);
            CHECK(pes.q.q[i] <= 1.0);
            CHECK(exact_pes.q.q[i] >= 0);
            CHECK(exact_pes.q.q[i] <= 1);
        }
        // the exact result is a fixed point of the one-step operator
        for (const auto s : em.survivors().members()) {
            Rational next = em.mass(s, ge[s], em.failed());
            const auto row = em.row(s, ge[s]);
            for (const auto t : em.survivors().members()) next += row[t.index] * exact_pes.q.q[t.index];
            CHECK(next == exact_pes.q.q[s.index]);
        }
        if (!membership_test(a, g) || a.g_star.empty()) continue;
        ++in_class;
        double residual = 1;
        const auto reduced = evaluate_in_class(fm, a, g, {}, &residual);
        CHECK(residual <= 1e-10);
        CHECK(sup_distance(reduced.q, pes.q.q) <= 1e-9);
        CHECK(evaluate_in_class(em, compute_largest_absorbing(em), ge).q == exact_pes.q.q);

        // uniqueness in class: any bounded fixed point equals the reduced solution
        const auto sys = build_reduced_system(fm, a, g);
        std::vector<double> x(sys.size(), 1.0);
        for (int it = 0; it < 20000; ++it) {
            std::vector<double> y(sys.size());
            for (std::size_t r = 0; r < sys.size(); ++r) {
                y[r] = sys.v_b[r];
                for (std::size_t c = 0; c < sys.size(); ++c) y[r] += sys.p(r, c) * x[c];
            }
            x = std::move(y);
        }
        for (std::size_t r = 0; r < sys.size(); ++r) CHECK(std::abs(x[r] - reduced[sys.states[r]]) <= 1e-8);
    }
    MESSAGE("in-class policies with nonempty G*: " << in_class);
    CHECK(in_class >= 40);
}

TEST_CASE("property: finite horizon iterate matches simulation") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto fm = validate_model<double>(random_raw_model(rng));
        const auto g = random_policy(fm, rng);
        const auto q5 = pes_iterate(fm, g, 5);
        for (const auto s : fm.survivors().members()) {
            const auto est = simulate_survival(fm, g, s, 5, 20000, 1000 + trial);
            const double se = std::max(est.standard_error(), 1e-3);
            CHECK(std::abs(est.estimate - q5[s]) <= 5 * se);
        }
    }
}

TEST_CASE("slowly mixing chain: iteration stops close to the limit") {
    RawModel raw;
    raw.states = {"f", "x", "z"};
    raw.failed = {"f"};
    raw.actions = {{"f", {"a"}}, {"x", {"a"}}, {"z", {"a"}}};
    raw.transitions = {{"f", "a", {{"f", "1"}}},
                       {"x", "a", {{"x", "19/20"}, {"z", "1/20"}}},
                       {"z", "a", {{"f", "1/20"}, {"x", "19/20"}}}};
    const auto fm = validate_model<double>(raw);
    const auto em = validate_model<Rational>(raw);
    const auto g = first_policy(fm);
    const auto pes = evaluate_policy_pes(fm, g);
    CHECK(evaluate_policy_pes(em, first_policy(em)).q.q == std::vector<Rational>{1, 1, 1});
    CHECK(std::abs(pes.q.q[1] - 1.0) <= 1e-10);
    CHECK(std::abs(value_iterate_oe(fm).q.q[1] - 1.0) <= 1e-10);

    CHECK_FALSE(iteration_settled(1e-13, 1.0001e-13, 1e-12));
    CHECK(iteration_settled(1e-13, 1e-12, 1e-12));
    CHECK(iteration_settled(0.0, 0.0, 1e-12));
    CHECK_FALSE(iteration_settled(1e-13, 0.0, 1e-12));
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "tangleflow/error.hpp"
#include "tangleflow/model.hpp"

using namespace tangleflow;

namespace {

template <class F>
ErrorCode code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return ErrorCode::InvalidArgument;
}

double max_row_sum(const Matrix& m)
{
    double worst = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double s = 0.0;
        for (double x : m.row(r))
            s += x;
        worst = std::max(worst, std::fabs(s));
    }
    return worst;
}

void check_laplacian_shape(const Matrix& l)
{
    CHECK(asymmetry(l) == 0.0);
    CHECK(max_row_sum(l) == 0.0);
    for (std::size_t i = 0; i < l.rows(); ++i)
        for (std::size_t j = 0; j < l.cols(); ++j)
            if (i != j)
                CHECK(l(i, j) >= 0.0);
}

/// max_u |Σ_{edges at u} (x(v) + T - x(u))|
double planar_residual(const PeriodicQuotientGraph& g, const std::vector<Vec2>& x)
{
    std::vector<Vec2> acc(g.vertex_count());
    for (const QuotientEdge& e : g.edges()) {
        const Vec2 d = x[e.to] + g.translation(e.shift) - x[e.from];
        acc[e.from] = acc[e.from] + d;
        acc[e.to] = acc[e.to] - d;
    }
    double r = 0.0;
    for (const Vec2& a : acc)
        r = std::max({r, std::fabs(a.x), std::fabs(a.y)});
    return r;
}

} // namespace

TEST_CASE("two-vertex cycle assembles the double-edge Laplacian")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    const Matrix& l = sys.laplacians().graph;
    CHECK(l(0, 0) == -2.0);
    CHECK(l(0, 1) == 2.0);
    CHECK(l(1, 0) == 2.0);
    CHECK(l(1, 1) == -2.0);
    CHECK_FALSE(sys.is_weave());
    CHECK(sys.graph().degree(0) == 2);
}

TEST_CASE("bundled square-lattice design builds a valid system")
{
    auto sys = fixtures::system_of("fig1a.graph");
    CHECK(sys->vertex_count() == 4);
    check_laplacian_shape(sys->laplacians().graph);
    for (VertexId v = 0; v < 4; ++v)
        CHECK(sys->graph().degree(v) == 4);
}

TEST_CASE("graph validation errors")
{
    CHECK(code_of([] { build_entangled_system(fixtures::two_cycle(), CrossingMap({1})); }) ==
          ErrorCode::MismatchedVertexSet);
    CHECK(code_of([] {
              PeriodicQuotientGraph(3, {{0, 1, {0, 0}}, {0, 1, {1, 0}}, {2, 2, {0, 1}}}, {Vec2{1, 0}, Vec2{0, 1}});
          }) == ErrorCode::DisconnectedGraph);
    CHECK(code_of([] { PeriodicQuotientGraph(2, {{0, 1, {0, 0}}}, {Vec2{1, 2}, Vec2{2, 4}}); }) ==
          ErrorCode::InvalidLattice);
    CHECK(code_of([] { PeriodicQuotientGraph(2, {{0, 1, {0, 0}}, {1, 1, {0, 0}}}, {Vec2{1, 0}, Vec2{0, 1}}); }) ==
          ErrorCode::InvalidGraph);
    CHECK(code_of([] { PeriodicQuotientGraph(2, {{0, 3, {0, 0}}}, {Vec2{1, 0}, Vec2{0, 1}}); }) ==
          ErrorCode::InvalidGraph);
    CHECK(code_of([] { CrossingMap({1, 0}); }) == ErrorCode::ZeroSignEntry);
    // Shifted self-loops and parallel edges are fine.
    CHECK_NOTHROW(PeriodicQuotientGraph(1, {{0, 0, {1, 0}}, {0, 0, {0, 1}}}, {Vec2{1, 0}, Vec2{0, 1}}));
}

TEST_CASE("smallest weave")
{
    const WeaveSystem w = build_weave_system(WeaveDesign(2, 2, {1, -1, -1, 1}));
    CHECK(w.vertex_count() == 4);
    for (VertexId v = 0; v < 4; ++v) {
        CHECK(w.graph().degree(v) == 4);
        CHECK(w.blue_adjacency().of(v).size() == 2);
        CHECK(w.red_adjacency().of(v).size() == 2);
    }
    const LaplacianSet& l = w.laplacians();
    check_laplacian_shape(l.graph);
    CHECK(l.graph == *l.blue + *l.red);
    CHECK(norm_inf(*l.blue * *l.red - *l.red * *l.blue) == 0.0);
}

TEST_CASE("weave threads follow the vertex indexing")
{
    const WeaveDesign d(3, 4, std::vector<int>(12, 1));
    const WeaveSystem w = build_weave_system(d);
    CHECK(d.vertex(2, 1) == 9);
    CHECK(d.blue_of(9) == 2);
    CHECK(d.red_of(9) == 1);
    // Blue neighbours of v(1,0) are v(1,1) and v(1,3); red neighbours v(0,0) and v(2,0).
    auto sorted = [](std::span<const VertexId> s) {
        std::vector<VertexId> v(s.begin(), s.end());
        std::sort(v.begin(), v.end());
        return v;
    };
    CHECK(sorted(w.blue_adjacency().of(d.vertex(1, 0))) == std::vector<VertexId>{d.vertex(1, 1), d.vertex(1, 3)});
    CHECK(sorted(w.red_adjacency().of(d.vertex(1, 0))) == std::vector<VertexId>{d.vertex(0, 0), d.vertex(2, 0)});
}

TEST_CASE("weave validation errors")
{
    CHECK(code_of([] { WeaveDesign(2, 2, {1, 0, -1, 1}); }) == ErrorCode::ZeroSignEntry);
    CHECK(code_of([] { WeaveDesign(0, 2, {}); }) == ErrorCode::DegenerateSize);
    CHECK(code_of([] { WeaveDesign(2, 2, {1, 1, 1}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { WeaveDesign(1, 1, {1}, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Laplacian invariants hold on random weaves and graphs")
{
    std::mt19937_64 rng(7);
    for (int k = 0; k < 40; ++k) {
        const WeaveSystem w = fixtures::random_weave_system(rng, 8);
        const LaplacianSet& l = w.laplacians();
        check_laplacian_shape(l.graph);
        check_laplacian_shape(*l.blue);
        check_laplacian_shape(*l.red);
        CHECK(l.graph == *l.blue + *l.red);
        CHECK(norm_inf(*l.blue * *l.red - *l.red * *l.blue) == 0.0);

        const EntangledSystem g = fixtures::random_graph_system(rng);
        check_laplacian_shape(g.laplacians().graph);
    }
}

TEST_CASE("harmonic coordinates of the two-vertex cycle")
{
    // Vertex 0 balances its two edges to vertex 1 at offsets 0 and (1, 0): x1 - x0 = (-1/2, 0).
    const auto x = harmonic_planar_coordinates(fixtures::two_cycle());
    CHECK(x[0].x == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(x[1].x == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(std::fabs(x[0].y) < 1e-15);
    CHECK(std::fabs(x[1].y) < 1e-15);
}

TEST_CASE("harmonic coordinates of the honeycomb quotient")
{
    auto sys = fixtures::system_of("fig1b.graph");
    const auto x = sys->planar();
    // Solved by hand: x1 - x0 = (a1 + a2) / 3 = (1/2, sqrt(3)/6), barycenter 0.
    const double h = std::sqrt(3.0) / 12.0;
    CHECK(x[0].x == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(x[0].y == doctest::Approx(-h).epsilon(1e-12));
    CHECK(x[1].x == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(x[1].y == doctest::Approx(h).epsilon(1e-12));
    // All three bonds have the hexagonal length 1/sqrt(3).
    for (const QuotientEdge& e : sys->graph().edges()) {
        const Vec2 d = x[e.to] + sys->graph().translation(e.shift) - x[e.from];
        CHECK(std::sqrt(squared_norm(d)) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    }
}

TEST_CASE("harmonic coordinates of a weave form the line grid")
{
    const WeaveSystem w = build_weave_system(WeaveDesign(2, 3, std::vector<int>(6, 1), 0.5));
    const auto x = w.planar();
    const Vec2 origin = x[w.design().vertex(0, 0)];
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const Vec2 p = x[w.design().vertex(i, j)] - origin;
            CHECK(p.x == doctest::Approx(0.5 * static_cast<double>(i)).epsilon(1e-12));
            CHECK(p.y == doctest::Approx(0.5 * static_cast<double>(j)).epsilon(1e-12));
        }
}

TEST_CASE("harmonic coordinates are stationary with zero barycenter on random graphs")
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
        const EntangledSystem sys = fixtures::random_graph_system(rng);
        const auto x = harmonic_planar_coordinates(sys);
        CHECK(planar_residual(sys.graph(), x) <= 1e-10);
        Vec2 sum;
        for (const Vec2& p : x)
            sum = sum + p;
        CHECK(std::fabs(sum.x) <= 1e-10);
        CHECK(std::fabs(sum.y) <= 1e-10);
    }
}

TEST_CASE("make_configuration checks crossing signs")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    CHECK_NOTHROW(make_configuration(sys, {1, -1}, {-1, 1}));
    try {
        make_configuration(sys, {1, 1}, {-1, 1});
        FAIL("expected SignViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SignViolation);
        REQUIRE(e.vertex().has_value());
        CHECK(*e.vertex() == 1); // second vertex, zero gap
    }
    CHECK(code_of([&] { make_configuration(sys, {-1, -1}, {1, 1}); }) == ErrorCode::SignViolation);
    CHECK(code_of([&] { make_configuration(sys, {1}, {-1}); }) == ErrorCode::MismatchedVertexSet);
    CHECK(code_of([&] { make_configuration(sys, {NAN, -1}, {-1, 1}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("random heights corrected by per-vertex swap are sign consistent")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 30; ++k) {
        const EntangledSystem sys = fixtures::random_graph_system(rng);
        const std::size_t n = sys.vertex_count();
        std::vector<double> zb(n);
        std::vector<double> zr(n);
        for (std::size_t v = 0; v < n; ++v) {
            zb[v] = normal(rng);
            zr[v] = normal(rng);
            if ((zb[v] - zr[v]) * sys.crossing()[v] < 0.0)
                std::swap(zb[v], zr[v]);
        }
        const Configuration c = make_configuration(sys, zb, zr);
        for (std::size_t v = 0; v < n; ++v)
            CHECK(c.gap(v) * sys.crossing()[v] > 0.0);
    }
}

TEST_CASE("random initial configuration")
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 30; ++k) {
        const WeaveSystem w = fixtures::random_weave_system(rng);
        const Configuration a = random_initial_configuration(w, 42, 0.7);
        const Configuration b = random_initial_configuration(w, 42, 0.7);
        CHECK(std::equal(a.z_blue().begin(), a.z_blue().end(), b.z_blue().begin()));
        CHECK(std::equal(a.z_red().begin(), a.z_red().end(), b.z_red().begin()));
        CHECK(std::fabs(a.total_height()) <= 1e-12);
        for (VertexId v = 0; v < a.size(); ++v) {
            CHECK(a.gap(v) * w.crossing()[v] > 0.0);
            // Gap lies in [2g, 4g] before the common shift, which keeps it.
            CHECK(std::fabs(a.gap(v)) >= 2 * 0.7 - 1e-12);
            CHECK(std::fabs(a.gap(v)) <= 4 * 0.7 + 1e-12);
        }
    }
    const EntangledSystem sys = fixtures::two_vertex(1, 1);
    const Configuration c1 = random_initial_configuration(sys, 1, 1.0);
    const Configuration c2 = random_initial_configuration(sys, 2, 1.0);
    CHECK(c1.z_blue()[0] != c2.z_blue()[0]);
    CHECK(code_of([&] { random_initial_configuration(sys, 1, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("configuration accessors")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    const Configuration c = make_configuration(sys, {1.0, -2.0}, {-1.0, 3.0});
    CHECK(c.gap(0) == 2.0);
    CHECK(c.gap(1) == -5.0);
    CHECK(c.mid(1) == 1.0);
    CHECK(c.min_abs_gap() == 2.0);
    CHECK(c.total_height() == 1.0);
    CHECK(c.mean_blue() == -0.5);
    CHECK(c.mean_red() == 1.0);
}

TEST_CASE("subweave barycenter sums heights along the chosen threads")
{
    const WeaveSystem w = build_weave_system(WeaveDesign(2, 2, {1, 1, 1, 1}));
    const Configuration c = make_configuration(w, {1, 2, 3, 4}, {-1, -2, -3, -4});
    // blue thread 0 crosses v0, v1; red thread 1 crosses v1, v3.
    CHECK(subweave_barycenter(w, c, ThreadSet{{0}, {}}) == 3.0);
    CHECK(subweave_barycenter(w, c, ThreadSet{{}, {1}}) == -6.0);
    CHECK(subweave_barycenter(w, c, ThreadSet{{0, 1}, {0, 1}}) == 0.0);
    CHECK(code_of([&] { subweave_barycenter(w, c, ThreadSet{{2}, {}}); }) == ErrorCode::IndexOutOfRange);
}

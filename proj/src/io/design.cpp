#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tangleflow/error.hpp"
#include "tangleflow/io.hpp"

namespace tangleflow {
namespace {

constexpr std::array<std::string_view, 10> kFlowKeys{"dt_init",         "dt_min",    "dt_max",        "t_max",
                                                     "grad_tol",        "gap_safety", "record_stride", "samples_per_decade",
                                                     "stability_margin", "max_steps"};

struct Token {
    std::string_view text;
    std::size_t column; // 1-based
};

std::vector<Token> tokenize(std::string_view line)
{
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
            ++i;
        if (i > start)
            out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

class LineParser {
public:
    LineParser(std::size_t line, std::vector<Token> tokens) : line_(line), tokens_(std::move(tokens)) {}

    const Token& directive() const { return tokens_.front(); }
    std::size_t arg_count() const { return tokens_.size() - 1; }

    [[noreturn]] void syntax(const Token& t, const std::string& msg) const
    {
        throw ParseError(ErrorCode::SyntaxError, line_, t.column, msg);
    }
    [[noreturn]] void semantic(const Token& t, const std::string& msg) const
    {
        throw ParseError(ErrorCode::SemanticError, line_, t.column, msg);
    }
    [[noreturn]] void semantic(const std::string& msg) const { semantic(directive(), msg); }

    void expect_args(std::size_t n) const
    {
        if (arg_count() < n) {
            const Token& last = tokens_.back();
            syntax({last.text, last.column + last.text.size()},
                   std::string(directive().text) + " expects " + std::to_string(n) + " argument(s)");
        }
        if (arg_count() > n)
            syntax(tokens_[n + 1], "unexpected extra token '" + std::string(tokens_[n + 1].text) + "'");
    }
    void expect_some_args() const
    {
        if (arg_count() == 0) {
            const Token& d = directive();
            syntax({d.text, d.column + d.text.size()}, std::string(d.text) + " expects at least one value");
        }
    }

    const Token& arg(std::size_t k) const { return tokens_[k + 1]; }
    std::string_view word(std::size_t k) const { return arg(k).text; }

    double real(std::size_t k) const
    {
        const Token& t = arg(k);
        double v = 0.0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        if (!t.text.empty() && *first == '+')
            ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            syntax(t, "expected a number, got '" + std::string(t.text) + "'");
        if (!std::isfinite(v))
            semantic(t, "value must be finite");
        return v;
    }

    long long integer(std::size_t k) const
    {
        const Token& t = arg(k);
        long long v = 0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        if (!t.text.empty() && *first == '+')
            ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            syntax(t, "expected an integer, got '" + std::string(t.text) + "'");
        return v;
    }

    std::size_t count(std::size_t k) const
    {
        const long long v = integer(k);
        if (v < 0)
            semantic(arg(k), "expected a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

    int sign(std::size_t k) const
    {
        const std::string_view s = word(k);
        if (s == "+" || s == "+1" || s == "1")
            return 1;
        if (s == "-" || s == "-1")
            return -1;
        if (s == "0" || s == "+0" || s == "-0")
            semantic(arg(k), "sign entries must be +1 or -1, got 0");
        syntax(arg(k), "expected a sign (+1 or -1), got '" + std::string(s) + "'");
    }

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
    std::vector<Token> tokens_;
};

struct Pending {
    std::optional<std::size_t> vertices;
    std::optional<LatticeBasis> basis;
    std::vector<QuotientEdge> edges;
    std::optional<std::vector<int>> signs;
    std::optional<std::size_t> n_blue;
    std::optional<std::size_t> n_red;
    std::optional<double> spacing;
    std::vector<std::vector<int>> rows;
};

[[noreturn]] void semantic_at(std::size_t line, const std::string& msg)
{
    throw ParseError(ErrorCode::SemanticError, std::max<std::size_t>(line, 1), 1, msg);
}

std::string kind_name(ModelKind k) { return k == ModelKind::Weave ? "weave" : "entangled-graph"; }

} // namespace

std::span<const std::string_view> flow_keys() noexcept { return kFlowKeys; }

FlowParams DesignFile::flow_params() const
{
    FlowParams p;
    for (const auto& [key, value] : flow) {
        if (key == "dt_init")
            p.dt_init = value;
        else if (key == "dt_min")
            p.dt_min = value;
        else if (key == "dt_max")
            p.dt_max = value;
        else if (key == "t_max")
            p.t_max = value;
        else if (key == "grad_tol")
            p.grad_tol = value;
        else if (key == "gap_safety")
            p.gap_safety = value;
        else if (key == "record_stride")
            p.record_stride = static_cast<std::size_t>(value);
        else if (key == "samples_per_decade")
            p.samples_per_decade = static_cast<std::size_t>(value);
        else if (key == "stability_margin")
            p.stability_margin = value;
        else if (key == "max_steps")
            p.max_steps = static_cast<std::size_t>(value);
    }
    return p;
}

DesignFile parse_design(std::string_view text)
{
    DesignFile out;
    Pending pend;
    std::optional<ModelKind> kind;
    std::set<std::string, std::less<>> seen;
    std::size_t last_line = 0;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        std::vector<Token> tokens = tokenize(raw);
        if (tokens.empty()) {
            if (eol == text.size())
                break;
            continue;
        }
        last_line = line_no;
        LineParser lp(line_no, std::move(tokens));
        const std::string_view d = lp.directive().text;

        static const std::set<std::string_view> repeatable{"edge", "row", "flow"};
        static const std::set<std::string_view> graph_only{"vertices", "basis", "edge", "signs"};
        static const std::set<std::string_view> weave_only{"n_blue", "n_red", "spacing", "row"};
        static const std::set<std::string_view> common{"kind", "z_blue", "z_red", "seed", "gap_scale", "flow"};
        if (!graph_only.count(d) && !weave_only.count(d) && !common.count(d))
            lp.syntax(lp.directive(), "unknown directive '" + std::string(d) + "'");
        if (!repeatable.count(d) && !seen.insert(std::string(d)).second)
            lp.semantic("duplicate directive '" + std::string(d) + "'");
        if (d != "kind" && !kind)
            lp.semantic("the first directive must be 'kind'");
        if (kind && ((*kind == ModelKind::Weave && graph_only.count(d)) ||
                     (*kind == ModelKind::EntangledGraph && weave_only.count(d))))
            lp.semantic("'" + std::string(d) + "' is not valid for kind " + kind_name(*kind));

        if (d == "kind") {
            lp.expect_args(1);
            if (lp.word(0) == "entangled-graph")
                kind = ModelKind::EntangledGraph;
            else if (lp.word(0) == "weave")
                kind = ModelKind::Weave;
            else
                lp.syntax(lp.arg(0), "kind must be 'entangled-graph' or 'weave'");
        } else if (d == "vertices") {
            lp.expect_args(1);
            pend.vertices = lp.count(0);
        } else if (d == "basis") {
            lp.expect_args(4);
            pend.basis = LatticeBasis{Vec2{lp.real(0), lp.real(1)}, Vec2{lp.real(2), lp.real(3)}};
        } else if (d == "edge") {
            lp.expect_args(4);
            const std::size_t u = lp.count(0);
            const std::size_t v = lp.count(1);
            const long long a = lp.integer(2);
            const long long b = lp.integer(3);
            if (pend.vertices && (u >= *pend.vertices || v >= *pend.vertices))
                lp.semantic(lp.arg(u >= *pend.vertices ? 0 : 1), "vertex index out of range");
            pend.edges.push_back({u, v, {static_cast<int>(a), static_cast<int>(b)}});
        } else if (d == "signs") {
            lp.expect_some_args();
            std::vector<int> s;
            for (std::size_t k = 0; k < lp.arg_count(); ++k)
                s.push_back(lp.sign(k));
            pend.signs = std::move(s);
        } else if (d == "n_blue" || d == "n_red") {
            lp.expect_args(1);
            const std::size_t n = lp.count(0);
            if (n < 1)
                lp.semantic(lp.arg(0), "a weave needs at least one thread of each colour");
            (d == "n_blue" ? pend.n_blue : pend.n_red) = n;
        } else if (d == "spacing") {
            lp.expect_args(1);
            const double s = lp.real(0);
            if (!(s > 0.0))
                lp.semantic(lp.arg(0), "spacing must be positive");
            pend.spacing = s;
        } else if (d == "row") {
            lp.expect_some_args();
            std::vector<int> r;
            for (std::size_t k = 0; k < lp.arg_count(); ++k)
                r.push_back(lp.sign(k));
            if (pend.n_red && r.size() != *pend.n_red)
                lp.semantic("row has " + std::to_string(r.size()) + " entries, expected n_red = " +
                            std::to_string(*pend.n_red));
            if (!pend.rows.empty() && r.size() != pend.rows.front().size())
                lp.semantic("ragged sign matrix: row has " + std::to_string(r.size()) + " entries, first row has " +
                            std::to_string(pend.rows.front().size()));
            pend.rows.push_back(std::move(r));
        } else if (d == "z_blue" || d == "z_red") {
            lp.expect_some_args();
            std::vector<double> z;
            for (std::size_t k = 0; k < lp.arg_count(); ++k)
                z.push_back(lp.real(k));
            (d == "z_blue" ? out.z_blue : out.z_red) = std::move(z);
        } else if (d == "seed") {
            lp.expect_args(1);
            const long long s = lp.integer(0);
            if (s < 0)
                lp.semantic(lp.arg(0), "seed must be nonnegative");
            out.seed = static_cast<std::uint64_t>(s);
        } else if (d == "gap_scale") {
            lp.expect_args(1);
            const double g = lp.real(0);
            if (!(g > 0.0))
                lp.semantic(lp.arg(0), "gap_scale must be positive");
            out.gap_scale = g;
        } else if (d == "flow") {
            lp.expect_args(2);
            const std::string_view key = lp.word(0);
            if (std::find(kFlowKeys.begin(), kFlowKeys.end(), key) == kFlowKeys.end())
                lp.syntax(lp.arg(0), "unknown flow parameter '" + std::string(key) + "'");
            for (const auto& kv : out.flow)
                if (kv.first == key)
                    lp.semantic(lp.arg(0), "duplicate flow parameter '" + std::string(key) + "'");
            const double v = lp.real(1);
            if (key == "record_stride" || key == "samples_per_decade" || key == "max_steps") {
                if (v < 0.0 || v != std::floor(v))
                    lp.semantic(lp.arg(1), std::string(key) + " must be a nonnegative integer");
            }
            out.flow.emplace_back(std::string(key), v);
        }
        if (eol == text.size())
            break;
    }

    auto fail = [&](const std::string& msg) { semantic_at(last_line, msg); };
    if (!kind)
        fail("missing 'kind' directive");
    out.kind = *kind;

    std::size_t n = 0;
    try {
        if (*kind == ModelKind::EntangledGraph) {
            if (!pend.vertices)
                fail("missing 'vertices'");
            if (!pend.basis)
                fail("missing 'basis'");
            if (pend.edges.empty())
                fail("graph has no 'edge' lines");
            if (!pend.signs)
                fail("missing 'signs'");
            n = *pend.vertices;
            if (pend.signs->size() != n)
                fail("signs has " + std::to_string(pend.signs->size()) + " entries for " + std::to_string(n) +
                     " vertices");
            out.graph.emplace(n, pend.edges, *pend.basis);
            out.crossing.emplace(*pend.signs);
        } else {
            if (!pend.n_blue)
                fail("missing 'n_blue'");
            if (!pend.n_red)
                fail("missing 'n_red'");
            if (pend.rows.size() != *pend.n_blue)
                fail("sign matrix has " + std::to_string(pend.rows.size()) + " rows, expected n_blue = " +
                     std::to_string(*pend.n_blue));
            std::vector<int> flat;
            for (const auto& r : pend.rows)
                flat.insert(flat.end(), r.begin(), r.end());
            out.weave.emplace(*pend.n_blue, *pend.n_red, std::move(flat), pend.spacing.value_or(1.0));
            n = *pend.n_blue * *pend.n_red;
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(e.what());
    }

    if (out.z_blue.has_value() != out.z_red.has_value())
        fail("z_blue and z_red must be given together");
    if (out.z_blue && (out.z_blue->size() != n || out.z_red->size() != n))
        fail("initial heights must have one value per vertex (" + std::to_string(n) + ")");
    if (out.z_blue) {
        const std::span<const int> signs = out.weave ? out.weave->signs() : out.crossing->values();
        for (std::size_t v = 0; v < n; ++v) {
            const double d = (*out.z_blue)[v] - (*out.z_red)[v];
            if (!std::isfinite(d) || !(d * signs[v] > 0.0))
                fail("initial heights violate the crossing sign at vertex " + std::to_string(v));
        }
    }
    return out;
}

std::string serialize_design(const DesignFile& design)
{
    std::ostringstream os;
    os << "kind " << kind_name(design.kind) << '\n';
    auto sign = [](int s) { return s > 0 ? "+1" : "-1"; };
    if (design.kind == ModelKind::EntangledGraph) {
        const PeriodicQuotientGraph& g = *design.graph;
        os << "vertices " << g.vertex_count() << '\n';
        os << "basis " << format_number(g.basis()[0].x) << ' ' << format_number(g.basis()[0].y) << ' '
           << format_number(g.basis()[1].x) << ' ' << format_number(g.basis()[1].y) << '\n';
        for (const QuotientEdge& e : g.edges())
            os << "edge " << e.from << ' ' << e.to << ' ' << e.shift.a << ' ' << e.shift.b << '\n';
        os << "signs";
        for (int s : design.crossing->values())
            os << ' ' << sign(s);
        os << '\n';
    } else {
        const WeaveDesign& w = *design.weave;
        os << "n_blue " << w.n_blue() << '\n';
        os << "n_red " << w.n_red() << '\n';
        os << "spacing " << format_number(w.spacing()) << '\n';
        for (std::size_t i = 0; i < w.n_blue(); ++i) {
            os << "row";
            for (std::size_t j = 0; j < w.n_red(); ++j)
                os << ' ' << sign(w.sign(i, j));
            os << '\n';
        }
    }
    if (design.z_blue) {
        os << "z_blue";
        for (double z : *design.z_blue)
            os << ' ' << format_number(z);
        os << "\nz_red";
        for (double z : *design.z_red)
            os << ' ' << format_number(z);
        os << '\n';
    }
    if (design.seed)
        os << "seed " << *design.seed << '\n';
    if (design.gap_scale)
        os << "gap_scale " << format_number(*design.gap_scale) << '\n';
    for (const auto& [key, value] : design.flow)
        os << "flow " << key << ' ' << format_number(value) << '\n';
    return os.str();
}

DesignFile load_design(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::IoError, "cannot read " + path.string());
    return parse_design(ss.str());
}

std::unique_ptr<System> build_system(const DesignFile& design)
{
    if (design.kind == ModelKind::Weave)
        return std::make_unique<WeaveSystem>(build_weave_system(*design.weave));
    return std::make_unique<EntangledSystem>(build_entangled_system(*design.graph, *design.crossing));
}

Configuration initial_configuration(const DesignFile& design, const System& system,
                                    std::optional<std::uint64_t> seed_override)
{
    if (design.z_blue && !seed_override)
        return make_configuration(system, *design.z_blue, *design.z_red);
    const std::uint64_t seed = seed_override.value_or(design.seed.value_or(1));
    return random_initial_configuration(system, seed, design.gap_scale.value_or(1.0));
}

} // namespace tangleflow

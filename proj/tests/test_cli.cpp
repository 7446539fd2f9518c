#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "gengsp/graph.hpp"
#include "gengsp/sampling.hpp"
#include "gengsp/signal.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace gengsp;

namespace {

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Sandbox {
public:
    explicit Sandbox(const std::string& name) : dir_(fs::temp_directory_path() / ("gengsp_cli_" + name)) {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Sandbox() { fs::remove_all(dir_); }

    std::string path(const std::string& file) const { return (dir_ / file).string(); }

    void write(const std::string& file, const std::string& text) const { std::ofstream(path(file)) << text; }

    Run run(const std::string& args) const {
        const std::string cmd = std::string(GENGSP_CLI_PATH) + " " + args + " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
        const int raw = std::system(cmd.c_str());
        Run r;
        r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        r.out = slurp(path("stdout.txt"));
        r.err = slurp(path("stderr.txt"));
        return r;
    }

private:
    fs::path dir_;
};

void write_graph(const Sandbox& box, const std::string& file, const Graph& g) {
    std::ofstream out(box.path(file));
    write_edge_list(out, g);
}

}  // namespace

TEST_CASE("transform and its inverse round trip") {
    Sandbox box("roundtrip");
    const Graph g = random_weighted_graph(5, {Topology::Complete, 0.0}, 2);
    write_graph(box, "g.csv", g);
    const SignalContext ctx(build_shift(g, ShiftKind::Laplacian), HilbertBasis::half_integer_fourier(8));
    const GeneralizedSignal f = test::random_signal(ctx, 3);
    std::vector<Sample> samples;
    for (std::size_t v = 0; v < 5; ++v)
        for (int j = 0; j < 20; ++j) {
            const double x = 0.1 + 0.3 * j + 0.01 * static_cast<double>(v);
            samples.push_back({v, x, f.evaluate(v, x)});
        }
    {
        std::ofstream out(box.path("f.csv"));
        write_samples(out, samples);
    }
    const Run fwd = box.run("transform --graph " + box.path("g.csv") + " --shift laplacian --basis half_fourier:8 --signal " +
                            box.path("f.csv") + " --out " + box.path("c.csv"));
    REQUIRE(fwd.status == 0);
    CHECK(slurp(box.path("c.csv")).rfind("phi_index,xi_index,re,im", 0) == 0);

    const Run inv = box.run("transform --inverse --graph " + box.path("g.csv") + " --basis half_fourier:8 --grid " + box.path("c.csv") +
                            " --points " + box.path("f.csv") + " --out " + box.path("back.csv"));
    REQUIRE(inv.status == 0);
    std::ifstream in(box.path("back.csv"));
    const auto back = read_samples(in);
    REQUIRE(back.size() == samples.size());
    double worst = 0.0;
    for (std::size_t l = 0; l < back.size(); ++l) {
        CHECK(back[l].vertex == samples[l].vertex);
        CHECK(back[l].x == samples[l].x);
        worst = std::max(worst, std::abs(back[l].value - samples[l].value));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("sample plans on the 4-cycle") {
    Sandbox box("sample");
    write_graph(box, "c4.csv", cycle_graph(4));
    const Run r = box.run("sample --graph " + box.path("c4.csv") +
                          " --basis half_fourier:5 --spec k=2,B=10 --strategy distributed:2 --out " + box.path("plan.csv"));
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["samples"] == 20);
    CHECK(j["per_vertex"] == nlohmann::json::array({5, 5, 5, 5}));
    std::ifstream in(box.path("plan.csv"));
    CHECK(read_plan(in).counts(4) == std::vector<std::size_t>{5, 5, 5, 5});

    const Run again = box.run("sample --graph " + box.path("c4.csv") +
                              " --basis half_fourier:5 --spec k=2,B=10 --strategy random:5 --seed 4 --out " + box.path("r1.csv"));
    const Run twice = box.run("sample --graph " + box.path("c4.csv") +
                              " --basis half_fourier:5 --spec k=2,B=10 --strategy random:5 --seed 4 --out " + box.path("r2.csv"));
    CHECK(again.status == 0);
    CHECK(twice.status == 0);
    CHECK(slurp(box.path("r1.csv")) == slurp(box.path("r2.csv")));
}

TEST_CASE("numerical failures exit with status 2") {
    Sandbox box("numerical");
    write_graph(box, "c4.csv", cycle_graph(4));
    const Run r = box.run("sample --graph " + box.path("c4.csv") +
                          " --basis half_fourier:5 --spec k=2,B=10 --strategy random:4 --out " + box.path("plan.csv"));
    CHECK(r.status == 2);
    const auto j = nlohmann::json::parse(r.err);
    CHECK(j["error"] == "PlanFailed");
    CHECK(j.contains("message"));

    box.write("thin.csv", "vertex,x,re,im\n0,1.0,1,0\n1,1.0,1,0\n");
    const Run rd = box.run("recover --graph " + box.path("c4.csv") + " --basis half_fourier:5 --spec k=2,B=10 --samples " +
                           box.path("thin.csv") + " --out " + box.path("grid.csv"));
    CHECK(rd.status == 2);
    CHECK(nlohmann::json::parse(rd.err)["error"] == "RankDeficient");
}

TEST_CASE("usage errors exit with status 1") {
    Sandbox box("usage");
    write_graph(box, "c4.csv", cycle_graph(4));
    CHECK(box.run("").status == 1);
    CHECK(box.run("sample --graph " + box.path("c4.csv") + " --basis half_fourier:5 --out " + box.path("p.csv")).status == 1);
    CHECK(box.run("sample --graph " + box.path("c4.csv") + " --basis half_fourier:5 --spec k=1,B=2 --bogus 1 --out " +
                  box.path("p.csv")).status == 1);
    CHECK(box.run("transform --graph " + box.path("c4.csv") + " --shift sideways --basis half_fourier:2 --out x.csv").status == 1);

    box.write("broken.csv", "u,v,w\n0,1\n");
    const Run bad = box.run("sample --graph " + box.path("broken.csv") + " --basis half_fourier:5 --spec k=1,B=2 --out " +
                            box.path("p.csv"));
    CHECK(bad.status == 1);
    CHECK(nlohmann::json::parse(bad.err)["error"] == "ParseError");

    const Run basis = box.run("sample --graph " + box.path("c4.csv") + " --basis wavelet:5 --spec k=1,B=2 --out " + box.path("p.csv"));
    CHECK(basis.status == 1);
}

TEST_CASE("filter subcommand") {
    Sandbox box("filter");
    const Graph g = path_graph(3);
    write_graph(box, "g.csv", g);
    const SignalContext ctx(build_shift(g, ShiftKind::Adjacency), HilbertBasis::chebyshev(4));
    const GeneralizedSignal f = test::random_signal(ctx, 1);
    {
        std::ofstream out(box.path("c.csv"));
        write_grid(out, f.coeffs(), ctx.basis());
    }
    box.write("k.json", R"({"kind":"band_pass","K":[{"graph":[-10,10],"freq":[0,1.5]}]})");
    const Run r = box.run("filter --graph " + box.path("g.csv") + " --shift adjacency --basis chebyshev:4 --grid " + box.path("c.csv") +
                          " --filter " + box.path("k.json") + " --out " + box.path("out.csv"));
    REQUIRE(r.status == 0);
    std::ifstream in(box.path("out.csv"));
    const Matrix out = read_grid(in, ctx);
    CHECK((out.leftCols(2) - f.coeffs().leftCols(2)).norm() == 0.0);
    CHECK(out.rightCols(2).norm() == 0.0);

    box.write("p.json", R"({"kind":"polynomial","coeffs":[1,1]})");
    const Run unbounded = box.run("filter --graph " + box.path("g.csv") + " --basis chebyshev:4 --grid " + box.path("c.csv") +
                                  " --filter " + box.path("p.json") + " --out " + box.path("o2.csv"));
    CHECK(unbounded.status == 2);
}

TEST_CASE("cascade and spectrum") {
    Sandbox box("cascade");
    write_graph(box, "g.csv", random_weighted_graph(12, {Topology::ErdosRenyi, 0.4}, 3));
    const std::string sim = "cascade --graph " + box.path("g.csv") + " --model SIR --lambda-i 1 --lambda-r 1 --horizon 5 --seeds 0,1 --seed 7 --out ";
    REQUIRE(box.run(sim + box.path("t1.csv")).status == 0);
    REQUIRE(box.run(sim + box.path("t2.csv")).status == 0);
    CHECK(slurp(box.path("t1.csv")) == slurp(box.path("t2.csv")));
    CHECK(slurp(box.path("t1.csv")).rfind("vertex,timestamp,status", 0) == 0);

    for (const std::string method : {"step", "tv"}) {
        const Run r = box.run("spectrum --graph " + box.path("g.csv") + " --shift adjacency --trace " + box.path("t1.csv") +
                              " --horizon 5 --method " + method + " --modes 8 --slots 16 --out " + box.path(method + ".csv"));
        REQUIRE(r.status == 0);
        const double spread = nlohmann::json::parse(r.out)["spectral_spread"].get<double>();
        CHECK(spread >= 0.0);
        CHECK(spread <= 1.0);
    }
    CHECK(box.run("cascade --graph " + box.path("g.csv") + " --model SEIR --out " + box.path("t3.csv")).status == 1);
}

TEST_CASE("experiment subcommand") {
    Sandbox box("experiment");
    box.write("recover.json", R"({"experiment":"recover","graph":{"generator":"grid","rows":6,"cols":6},"k":10,"B":6,"seed":2})");
    const Run r = box.run("experiment --config " + box.path("recover.json") + " --out " + box.path("out"));
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["experiment"] == "recover");
    CHECK(j["metrics"]["relative_coeff_error"].get<double>() < 1e-8);
    CHECK(fs::exists(box.path("out/report.json")));
    CHECK(fs::exists(box.path("out/plan.csv")));
    const Run again = box.run("experiment --config " + box.path("recover.json"));
    CHECK(nlohmann::json::parse(again.out)["metrics"] == j["metrics"]);

    box.write("bad.json", R"({"experiment":"recover","k":"x"})");
    CHECK(box.run("experiment --config " + box.path("bad.json")).status == 1);
}

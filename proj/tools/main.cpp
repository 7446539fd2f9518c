// gengsp command-line front end.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gengsp/cascade.hpp"
#include "gengsp/error.hpp"
#include "gengsp/experiments.hpp"
#include "gengsp/filters.hpp"
#include "gengsp/graph.hpp"
#include "gengsp/hilbert.hpp"
#include "gengsp/sampling.hpp"
#include "gengsp/signal.hpp"

namespace {

using namespace gengsp;

struct GraphArgs {
    std::string graph;
    std::size_t vertices = 0;
    std::string shift = "laplacian";
};

struct ContextArgs : GraphArgs {
    std::string basis;
};

void add_graph_flags(CLI::App* cmd, GraphArgs& a, bool with_shift = true) {
    cmd->add_option("--graph", a.graph, "Edge-list CSV (u,v,w)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--vertices", a.vertices, "Vertex count when isolated vertices trail the edge list");
    if (with_shift)
        cmd->add_option("--shift", a.shift, "Shift operator")
            ->check(CLI::IsMember({"adjacency", "laplacian"}))
            ->capture_default_str();
}

void add_context_flags(CLI::App* cmd, ContextArgs& a) {
    add_graph_flags(cmd, a);
    cmd->add_option("--basis", a.basis, "half_fourier:M, fourier:M[:T] or chebyshev:M")->required();
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
    return out;
}

Graph load_graph(const GraphArgs& a) { return read_edge_list_file(a.graph, a.vertices); }

SignalContext load_context(const ContextArgs& a) {
    return SignalContext(build_shift(load_graph(a), parse_shift_kind(a.shift)), parse_basis(a.basis));
}

std::string first_line(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    return line;
}

// Points to evaluate at: a plan (vertex,x) or a sample table (vertex,x,re,im).
SampleSet load_points(const std::string& path) {
    auto in = open_in(path);
    if (first_line(path) == "vertex,x") return read_plan(in);
    SampleSet w;
    for (const auto& s : read_samples(in)) w.points.push_back({s.vertex, s.x});
    return w;
}

std::vector<std::size_t> parse_ids(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        std::size_t used = 0;
        long long v = -1;
        try {
            v = std::stoll(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != part.size() || v < 0) throw Error(ErrorCode::ParseError, "bad vertex id \"" + part + "\"");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int fail(const std::string& code, const std::string& message, int status) {
    std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized graph signal processing on C^n (x) H"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gengsp 0.1.0");

    // transform
    ContextArgs tr;
    std::string tr_signal, tr_out, tr_grid, tr_points;
    bool tr_inverse = false;
    auto* transform = app.add_subcommand("transform", "Sample table to coefficient grid, or back with --inverse");
    add_context_flags(transform, tr);
    transform->add_flag("--inverse", tr_inverse, "Evaluate a coefficient grid at sample points");
    transform->add_option("--signal", tr_signal, "Sample table CSV (vertex,x,re,im)")->check(CLI::ExistingFile);
    transform->add_option("--grid", tr_grid, "Coefficient grid CSV for --inverse")->check(CLI::ExistingFile);
    transform->add_option("--points", tr_points, "Plan or sample CSV giving evaluation points for --inverse")
        ->check(CLI::ExistingFile);
    transform->add_option("--out", tr_out, "Output CSV")->required();

    // filter
    ContextArgs fl;
    std::string fl_grid, fl_spec, fl_out;
    auto* filter = app.add_subcommand("filter", "Apply a filter to a coefficient grid");
    add_context_flags(filter, fl);
    filter->add_option("--grid", fl_grid, "Coefficient grid CSV")->required()->check(CLI::ExistingFile);
    filter->add_option("--filter", fl_spec, "Filter spec JSON file")->required()->check(CLI::ExistingFile);
    filter->add_option("--out", fl_out, "Output grid CSV")->required();

    // sample
    ContextArgs sm;
    std::string sm_spec, sm_strategy = "vertex_subset", sm_out;
    std::uint64_t sm_seed = 0;
    auto* sample = app.add_subcommand("sample", "Design a sample plan for a bandlimited subspace");
    add_context_flags(sample, sm);
    sample->add_option("--spec", sm_spec, "Subspace, e.g. k=2,B=10")->required();
    sample->add_option("--strategy", sm_strategy,
                       "vertex_subset | distributed:t | random:k[:uniform] | random:k:normal:mean:stddev")
        ->capture_default_str();
    sample->add_option("--seed", sm_seed, "Seed for random strategies");
    sample->add_option("--out", sm_out, "Plan CSV (vertex,x)")->required();

    // recover
    ContextArgs rc;
    std::string rc_spec, rc_samples, rc_out;
    auto* recover_cmd = app.add_subcommand("recover", "Least-squares recovery of a bandlimited signal");
    add_context_flags(recover_cmd, rc);
    recover_cmd->add_option("--spec", rc_spec, "Subspace, e.g. k=2,B=10")->required();
    recover_cmd->add_option("--samples", rc_samples, "Sample table CSV (vertex,x,re,im)")
        ->required()
        ->check(CLI::ExistingFile);
    recover_cmd->add_option("--out", rc_out, "Recovered grid CSV")->required();

    // cascade
    GraphArgs cs;
    std::string cs_model = "SI", cs_seeds = "0", cs_out;
    double cs_li = 1.0, cs_lr = 1.0, cs_horizon = 10.0;
    std::uint64_t cs_seed = 0;
    auto* cascade = app.add_subcommand("cascade", "Simulate an SI/SIR/SIRI cascade");
    add_graph_flags(cascade, cs, false);
    cascade->add_option("--model", cs_model, "SI, SIR or SIRI")->capture_default_str();
    cascade->add_option("--lambda-i", cs_li, "Mean infection waiting time")->capture_default_str();
    cascade->add_option("--lambda-r", cs_lr, "Mean recovery waiting time")->capture_default_str();
    cascade->add_option("--horizon", cs_horizon, "Time horizon T")->capture_default_str();
    cascade->add_option("--seeds", cs_seeds, "Comma-separated initially infected vertices")->capture_default_str();
    cascade->add_option("--seed", cs_seed, "Random seed");
    cascade->add_option("--out", cs_out, "Trace CSV (vertex,timestamp,status)")->required();

    // spectrum
    GraphArgs sp;
    std::string sp_trace, sp_method = "step", sp_out;
    double sp_horizon = 10.0;
    std::size_t sp_modes = 32, sp_slots = 64;
    auto* spectrum = app.add_subcommand("spectrum", "Joint spectrum of a cascade trace");
    add_graph_flags(spectrum, sp);
    spectrum->add_option("--trace", sp_trace, "Trace CSV")->required()->check(CLI::ExistingFile);
    spectrum->add_option("--horizon", sp_horizon, "Time horizon T of the trace")->capture_default_str();
    spectrum->add_option("--method", sp_method, "step (closed form) or tv (slotted DFT)")
        ->check(CLI::IsMember({"step", "tv"}))
        ->capture_default_str();
    spectrum->add_option("--modes", sp_modes, "Fourier truncation M for step")->capture_default_str();
    spectrum->add_option("--slots", sp_slots, "Slot count for tv")->capture_default_str();
    spectrum->add_option("--out", sp_out, "Spectrum CSV (graph_eig,freq,magnitude)")->required();

    // experiment
    std::string ex_config, ex_out;
    auto* experiment = app.add_subcommand("experiment", "Run an experiment from a JSON config");
    experiment->add_option("--config", ex_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    experiment->add_option("--out", ex_out, "Output directory for report.json and artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    try {
        if (*transform) {
            const auto ctx = load_context(tr);
            if (!tr_inverse) {
                if (tr_signal.empty()) throw Error(ErrorCode::InvalidArgument, "transform needs --signal");
                auto in = open_in(tr_signal);
                const auto fit = fit_samples(read_samples(in), ctx);
                auto out = open_out(tr_out);
                write_grid(out, fit.signal.coeffs(), ctx.basis());
                emit({{"residual_norm", fit.residual_norm}});
            } else {
                if (tr_grid.empty() || tr_points.empty())
                    throw Error(ErrorCode::InvalidArgument, "--inverse needs --grid and --points");
                auto in = open_in(tr_grid);
                const GeneralizedSignal f(ctx, read_grid(in, ctx));
                const auto w = load_points(tr_points);
                const auto values = evaluate_at(f, w);
                std::vector<Sample> samples;
                for (std::size_t l = 0; l < w.size(); ++l) samples.push_back({w.points[l].vertex, w.points[l].x, values[l]});
                auto out = open_out(tr_out);
                write_samples(out, samples);
            }
        } else if (*filter) {
            const auto ctx = load_context(fl);
            auto grid_in = open_in(fl_grid);
            const GeneralizedSignal f(ctx, read_grid(grid_in, ctx));
            auto spec_in = open_in(fl_spec);
            const std::string text((std::istreambuf_iterator<char>(spec_in)), std::istreambuf_iterator<char>());
            const auto result = apply(parse_filter_json(text, ctx), f);
            auto out = open_out(fl_out);
            write_grid(out, result.coeffs(), ctx.basis());
        } else if (*sample) {
            const auto ctx = load_context(sm);
            const auto spec = parse_subspace(sm_spec, ctx.basis());
            const auto w = plan_samples(spec, ctx, parse_strategy(sm_strategy, sm_seed));
            auto out = open_out(sm_out);
            write_plan(out, w);
            emit({{"samples", w.size()}, {"dimension", spec.dimension()}, {"per_vertex", w.counts(ctx.vertices())}});
        } else if (*recover_cmd) {
            const auto ctx = load_context(rc);
            const auto spec = parse_subspace(rc_spec, ctx.basis());
            auto in = open_in(rc_samples);
            const auto samples = read_samples(in);
            SampleSet w;
            std::vector<Complex> values;
            for (const auto& s : samples) {
                w.points.push_back({s.vertex, s.x});
                values.push_back(s.value);
            }
            w.validate(ctx);
            const auto r = recover(w, values, spec, ctx);
            if (r.rank_deficient)
                throw Error(ErrorCode::RankDeficient, "samples do not determine the subspace (rank " +
                                                          std::to_string(r.rank) + " of " +
                                                          std::to_string(spec.dimension()) + ")");
            auto out = open_out(rc_out);
            write_grid(out, r.grid, ctx.basis());
            emit({{"residual_norm", r.residual_norm}, {"rank", r.rank}});
        } else if (*cascade) {
            const auto g = load_graph(cs);
            const auto trace =
                simulate(g, parse_cascade_model(cs_model), cs_li, cs_lr, cs_horizon, parse_ids(cs_seeds), cs_seed);
            auto out = open_out(cs_out);
            write_trace(out, trace);
        } else if (*spectrum) {
            const auto g = load_graph(sp);
            const auto kind = parse_shift_kind(sp.shift);
            const auto shift = build_shift(g, kind);
            auto in = open_in(sp_trace);
            const auto trace = read_trace(in, g.size(), sp_horizon);
            RealMatrix mag;
            std::vector<double> freqs;
            if (sp_method == "step") {
                const auto basis = HilbertBasis::fourier_series(sp_modes, sp_horizon);
                mag = step_spectrum(trace, shift, basis);
                for (const auto& e : basis.elements()) freqs.push_back(e.freq_label);
            } else {
                mag = tv_spectrum(trace, shift, sp_slots);
                freqs = tv_frequencies(sp_slots, sp_horizon);
            }
            auto out = open_out(sp_out);
            write_spectrum(out, mag, shift.eigenvalues, freqs);
            emit({{"spectral_spread", spectral_spread(mag, shift.eigenvalues, kind, freqs)}});
        } else if (*experiment) {
            auto in = open_in(ex_config);
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const auto report = run_experiment(text, ex_out);
            const auto body = report.to_json();
            if (!ex_out.empty()) open_out((std::filesystem::path(ex_out) / "report.json").string()) << body;
            std::cout << body;
        }
    } catch (const Error& e) {
        return fail(std::string(to_string(e.code())), e.what(), is_numerical(e.code()) ? 2 : 1);
    } catch (const std::exception& e) {
        return fail("InvalidArgument", e.what(), 1);
    }
    return 0;
}

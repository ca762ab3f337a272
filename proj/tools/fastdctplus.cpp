// Benchmark and transform CLI for the Fast DCT+ library.
//
//   fastdctplus accuracy  --sizes 8,16,32 --trials 1000 --eps 1e-12 --out acc.csv
//   fastdctplus runtime   --sizes 8,...,256 --trials 2000 --out rt.csv
//   fastdctplus prune     --sizes 32 --cp 16 --threshold 50 --out prune.csv
//   fastdctplus transform --update selfloop:1:1.5 < signal.txt
//
// CSV rows are `mode,size,update,method,metric,value` with %.6e values.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dctplus/dctplus.hpp"

namespace {

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) sizes.push_back(std::stoul(item));
    }
    return sizes;
}

int run_mode(dctplus::BenchMode mode, const dctplus::BenchConfig& cfg, const std::string& out) {
    std::ostringstream buf;
    switch (mode) {
        case dctplus::BenchMode::accuracy: dctplus::run_accuracy(cfg, buf); break;
        case dctplus::BenchMode::runtime: dctplus::run_runtime(cfg, buf); break;
        case dctplus::BenchMode::prune: dctplus::run_prune(cfg, buf); break;
    }
    if (out.empty() || out == "-") {
        std::cout << buf.str();
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file '" << out << "'\n";
        return 1;
    }
    f << buf.str();
    return 0;
}

std::vector<double> read_signal(std::istream& is) {
    std::vector<double> s;
    double v;
    while (is >> v) s.push_back(v);
    return s;
}

void write_signal(std::ostream& os, const std::vector<double>& s) {
    char buf[40];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", s[i]);
        os << buf << (i + 1 == s.size() ? "" : " ");
    }
    os << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fast graph Fourier transforms for rank-one updates of the path graph"};
    app.require_subcommand(1);

    std::string sizes_text = "8,16,32,64,128,256";
    std::size_t trials = 1000;
    std::vector<std::string> updates;
    double eps = 1e-12;
    std::uint64_t seed = 1;
    std::size_t cp = 0;
    double threshold = -1.0;
    std::string out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--sizes", sizes_text, "comma-separated signal sizes");
        sub->add_option("--trials", trials, "signals per cell");
        sub->add_option("--update", updates, "selfloop:i:w or edge:i:j:w (repeatable)");
        sub->add_option("--eps", eps, "transform precision");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--cp", cp, "pruning keep-count (0 sweeps n/8 multiples)");
        sub->add_option("--threshold", threshold,
                        "pruning decision threshold (negative: auto-calibrate)");
        sub->add_option("--out", out, "output CSV path ('-' or empty: stdout)");
    };

    CLI::App* acc = app.add_subcommand("accuracy", "mean SNR of Fast DCT+ vs the dense product");
    CLI::App* rt = app.add_subcommand("runtime", "per-signal runtimes and DCT-normalized ratios");
    CLI::App* pr = app.add_subcommand("prune", "pruned multi-transform ensemble experiment");
    add_common(acc);
    add_common(rt);
    add_common(pr);

    CLI::App* tr = app.add_subcommand("transform", "transform one signal (stdin or --in)");
    std::string tr_update, tr_graph, tr_in;
    bool tr_inverse = false;
    tr->add_option("--update", tr_update, "selfloop:i:w or edge:i:j:w (fast path-graph pipeline)");
    tr->add_option("--graph", tr_graph, "graph file for a dense general-graph GFT");
    tr->add_option("--in", tr_in, "signal file (default: stdin)");
    tr->add_option("--eps", eps, "transform precision");
    tr->add_flag("--inverse", tr_inverse, "apply the inverse transform instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(tr)) {
            std::vector<double> s;
            if (tr_in.empty()) {
                s = read_signal(std::cin);
            } else {
                std::ifstream f(tr_in);
                if (!f) throw std::runtime_error("cannot open signal file '" + tr_in + "'");
                s = read_signal(f);
            }
            if (s.size() < 2) throw std::runtime_error("signal needs at least 2 samples");

            std::vector<double> result;
            if (!tr_graph.empty()) {
                std::ifstream f(tr_graph);
                if (!f) throw std::runtime_error("cannot open graph file '" + tr_graph + "'");
                const dctplus::GraphSpec g = dctplus::read_graph(f);
                if (g.n != s.size())
                    throw std::runtime_error("signal length does not match graph size");
                const dctplus::SpectralBasis basis =
                    dctplus::dense_eigh(dctplus::build_laplacian(g).m);
                result = tr_inverse ? dctplus::matvec(basis.u, s) : dctplus::matvec_t(basis.u, s);
            } else {
                if (tr_update.empty())
                    throw std::runtime_error("transform needs --update or --graph");
                const dctplus::DctPlusPlan plan(s.size(), dctplus::parse_update(tr_update), eps);
                result = tr_inverse ? plan.inverse(s) : plan.forward(s);
            }
            write_signal(std::cout, result);
            return 0;
        }

        dctplus::BenchConfig cfg;
        cfg.sizes = parse_sizes(sizes_text);
        cfg.trials = trials;
        if (!updates.empty()) cfg.updates = updates;
        cfg.epsilon = eps;
        cfg.seed = seed;
        cfg.cp = cp;
        cfg.threshold = threshold;

        if (app.got_subcommand(acc)) return run_mode(dctplus::BenchMode::accuracy, cfg, out);
        if (app.got_subcommand(rt)) return run_mode(dctplus::BenchMode::runtime, cfg, out);
        if (app.got_subcommand(pr)) return run_mode(dctplus::BenchMode::prune, cfg, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qmsd/codes.hpp"
#include "qmsd/dense.hpp"
#include "qmsd/distill.hpp"
#include "qmsd/errors.hpp"
#include "qmsd/rng.hpp"
#include "qmsd/version.hpp"
#include "qmsd/wigner.hpp"
#include "qmsd/witness.hpp"

namespace {

using qmsd::Error;
using qmsd::ParseError;

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

uint64_t fnv1a64(const std::string& text) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

// Every file-producing command drops a sibling manifest recording the exact
// invocation, parameters, seed, library version and output digests.
struct ManifestBuilder {
    nlohmann::json doc;

    ManifestBuilder(const std::string& command, int argc, char** argv) {
        doc["command"] = command;
        std::vector<std::string> invocation(argv, argv + argc);
        doc["invocation"] = invocation;
        doc["version"] = qmsd::kVersion;
        doc["timestamp"] = iso_timestamp();
        doc["parameters"] = nlohmann::json::object();
        doc["outputs"] = nlohmann::json::array();
    }

    template <typename T>
    void param(const std::string& key, const T& value) {
        doc["parameters"][key] = value;
    }

    void output(const std::string& path, const std::string& content) {
        doc["outputs"].push_back({{"path", path}, {"fnv1a64", hex64(fnv1a64(content))}});
    }

    void write(const std::string& primary_output_path) const {
        write_file(primary_output_path + ".manifest.json", doc.dump(2) + "\n");
    }
};

// State files hold either a Wigner quasidistribution ({"values": ...}) or a
// dense matrix ({"re": ...}); pick by key.
qmsd::WignerFunction load_state_as_wigner(const std::string& path) {
    const std::string text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("state file: ") + e.what());
    }
    if (j.contains("values")) return qmsd::wigner_from_json(text);
    if (j.contains("re")) {
        int d = 0, n = 0;
        const Eigen::MatrixXcd rho = qmsd::density_from_json(text, &d, &n);
        return qmsd::wigner_from_density(rho, d, n);
    }
    throw ParseError("state file has neither \"values\" nor \"re\"");
}

Eigen::MatrixXcd load_state_as_density(const std::string& path, int* d_out) {
    const std::string text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("state file: ") + e.what());
    }
    if (j.contains("re")) {
        int n = 0;
        Eigen::MatrixXcd rho = qmsd::density_from_json(text, d_out, &n);
        if (n != 1) throw qmsd::ShapeError("state file must hold a single qudit");
        return rho;
    }
    if (j.contains("values")) {
        const qmsd::WignerFunction w = qmsd::wigner_from_json(text);
        if (w.n_qudits != 1) throw qmsd::ShapeError("state file must hold a single qudit");
        *d_out = w.d;
        return qmsd::density_from_wigner(w);
    }
    throw ParseError("state file has neither \"values\" nor \"re\"");
}

nlohmann::json wigner_json_value(const qmsd::WignerFunction& w) {
    nlohmann::json j;
    j["d"] = w.d;
    j["N"] = w.n_qudits;
    j["values"] = w.values;
    return j;
}

std::string distill_result_json(const qmsd::DistillationResult& result, const char* engine) {
    nlohmann::json j;
    j["engine"] = engine;
    j["w_out"] = wigner_json_value(result.w_out);
    j["acceptance_probability"] = result.acceptance_probability;
    j["histogram"] = result.histogram;
    return j.dump(2) + "\n";
}

void emit(const std::string& out_path, const std::string& content, ManifestBuilder& manifest) {
    if (out_path.empty()) {
        std::fputs(content.c_str(), stdout);
    } else {
        write_file(out_path, content);
        manifest.output(out_path, content);
        manifest.write(out_path);
    }
}

int run_canonicalize(const std::string& code_file, const std::string& out_path, int argc, char** argv) {
    const qmsd::StabilizerCode code = qmsd::load_code_file(code_file);
    const qmsd::CanonicalCode canon = qmsd::canonicalize(code);

    nlohmann::json j;
    j["d"] = canon.d;
    j["N"] = canon.N;
    j["n"] = canon.n;
    j["m"] = canon.m;
    auto matrix_json = [](const qmsd::ZdMatrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int r = 0; r < m.rows; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
            rows.push_back(row);
        }
        return rows;
    };
    j["A"] = matrix_json(canon.A);
    j["B"] = matrix_json(canon.B);
    j["C"] = matrix_json(canon.C);
    j["vec_a"] = canon.vec_a.e;
    j["vec_b"] = canon.vec_b.e;
    j["vec_c"] = canon.vec_c.e;
    j["permutation"] = canon.column_permutation;
    j["syndrome"] = canon.syndrome.e;
    j["trivial"] = qmsd::is_trivial(canon);

    ManifestBuilder manifest("canonicalize", argc, argv);
    manifest.param("code_file", code_file);
    emit(out_path, j.dump(2) + "\n", manifest);
    return 0;
}

int run_distill(const std::string& code_file, const std::string& state_file,
                const std::string& engine, uint64_t samples, uint64_t seed, int threads,
                const std::string& out_path, int argc, char** argv) {
    const qmsd::StabilizerCode code = qmsd::load_code_file(code_file);
    const qmsd::WignerFunction w_in = load_state_as_wigner(state_file);

    ManifestBuilder manifest("distill", argc, argv);
    manifest.param("code_file", code_file);
    manifest.param("state_file", state_file);
    manifest.param("engine", engine);
    manifest.param("threads", threads);

    std::string content;
    if (engine == "exact") {
        const qmsd::DistillationResult result = qmsd::distill_exact(code, w_in, threads);
        content = distill_result_json(result, "exact");
    } else {
        const qmsd::McDistillationResult mc = qmsd::distill_mc(code, w_in, samples, seed, threads);
        nlohmann::json j = nlohmann::json::parse(distill_result_json(mc.result, "mc"));
        j["samples"] = mc.samples;
        j["accepted"] = mc.accepted;
        j["seed"] = mc.seed;
        j["generator"] = qmsd::kMcGeneratorName;
        content = j.dump(2) + "\n";
        manifest.param("samples", samples);
        manifest.param("seed", seed);
        manifest.param("generator", qmsd::kMcGeneratorName);
    }
    emit(out_path, content, manifest);
    return 0;
}

int run_sweep(const std::string& code_file, int u, int v, double nu_min, double nu_max, int steps,
              int threads, const std::string& out_path, int argc, char** argv) {
    const qmsd::StabilizerCode code = qmsd::load_code_file(code_file);
    std::vector<double> grid(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        grid[static_cast<size_t>(i)] = nu_min + (nu_max - nu_min) * i / (steps - 1);
    }
    const std::vector<qmsd::SweepRow> rows = qmsd::nu_sweep(code, u, v, grid, threads);

    std::string csv = "nu_in,nu_out,acceptance_probability\n";
    for (const qmsd::SweepRow& row : rows) {
        csv += format_double(row.nu_in) + "," + format_double(row.nu_out) + "," +
               format_double(row.acceptance) + "\n";
    }

    ManifestBuilder manifest("sweep", argc, argv);
    manifest.param("code_file", code_file);
    manifest.param("face", std::vector<int>{u, v});
    manifest.param("nu_min", nu_min);
    manifest.param("nu_max", nu_max);
    manifest.param("steps", steps);
    manifest.param("threads", threads);
    emit(out_path, csv, manifest);
    return 0;
}

int run_witness(const std::string& state_file, int u, int v, const std::string& ancilla_file,
                const std::string& out_path, int argc, char** argv) {
    int d = 0;
    const Eigen::MatrixXcd rho = load_state_as_density(state_file, &d);
    Eigen::MatrixXcd sigma;
    if (ancilla_file.empty()) {
        sigma = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
    } else {
        int d2 = 0;
        sigma = load_state_as_density(ancilla_file, &d2);
        if (d2 != d) throw qmsd::DimensionMismatchError("ancilla modulus differs from system");
    }
    const qmsd::WitnessReport report = qmsd::witness_value(rho, sigma, qmsd::Prime(d), u, v);

    ManifestBuilder manifest("witness", argc, argv);
    manifest.param("state_file", state_file);
    manifest.param("face", std::vector<int>{u, v});
    emit(out_path, qmsd::witness_report_to_json(report) + "\n", manifest);
    return 0;
}

int run_theorem2(int d, int n_max, int codes, uint64_t seed, int threads, int argc, char** argv) {
    (void)argc;
    (void)argv;
    const qmsd::Prime prime(d);
    std::mt19937_64 rng(qmsd::derive_stream_seed(seed, 0x7e02));
    std::printf("digest,N,trivial,min_gap\n");
    int failures = 0;
    for (int i = 0; i < codes; ++i) {
        const int n = 2 + static_cast<int>(qmsd::uniform_below(rng, static_cast<uint64_t>(n_max - 1)));
        const qmsd::StabilizerCode code = qmsd::random_code(prime, n, rng());
        const bool trivial = qmsd::is_trivial(qmsd::canonicalize(code));
        double min_gap = -1;
        for (int u = 0; u < d; ++u) {
            for (int v = 0; v < d; ++v) {
                const double gap = qmsd::verify_bound_gap(code, u, v, threads);
                if (min_gap < 0 || gap < min_gap) min_gap = gap;
            }
        }
        const bool zero_gap = min_gap <= 1e-12;
        if (zero_gap != trivial) ++failures;
        std::printf("%s,%d,%s,%s\n", hex64(fnv1a64(qmsd::code_to_json(code))).c_str(), n,
                    trivial ? "true" : "false", format_double(min_gap).c_str());
    }
    std::printf("codes: %d\ndichotomy_failures: %d\n", codes, failures);
    return 0;
}

int run_graph(int d, int u, int v, const std::string& out_path, bool solve_mis, double budget,
              int threads, int argc, char** argv) {
    const qmsd::Prime prime(d);
    const qmsd::ExclusivityGraph graph = qmsd::build_graph(prime, u, v, threads);
    std::printf("vertices: %zu, edges: %zu\n", graph.vertices.size(), graph.edges.size());

    if (!out_path.empty()) {
        const std::string dimacs = qmsd::graph_to_dimacs(graph);
        ManifestBuilder manifest("graph", argc, argv);
        manifest.param("d", d);
        manifest.param("face", std::vector<int>{u, v});
        manifest.param("threads", threads);
        write_file(out_path, dimacs);
        manifest.output(out_path, dimacs);
        manifest.write(out_path);
    }
    if (solve_mis) {
        const qmsd::MisResult mis = qmsd::max_independent_set(graph, budget);
        if (mis.timed_out) {
            std::printf("timed_out: true\nbest_lower_bound: %d\n", mis.size);
        } else {
            std::printf("independence_number: %d\n", mis.size);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qudit stabilizer-reduction and contextuality toolkit"};
    app.require_subcommand(1);
    app.footer("Thread count: --threads N, or the QMSD_THREADS environment variable.");

    std::string code_file, state_file, ancilla_file, out_path, engine = "exact";
    uint64_t samples = 100000, seed = 1;
    int threads = 0;
    std::vector<int> face{0, 0};
    double nu_min = -1.0 / 3.0, nu_max = 1.0, budget = 600.0;
    int steps = 2, d = 3, n_max = 3, codes = 20;
    bool solve_mis = false;

    CLI::App* canonicalize = app.add_subcommand("canonicalize", "Canonical block form of a code");
    canonicalize->add_option("code_file", code_file)->required();
    canonicalize->add_option("--out", out_path, "Write JSON here instead of stdout");

    CLI::App* distill = app.add_subcommand("distill", "Run one stabilizer reduction");
    distill->add_option("code_file", code_file)->required();
    distill->add_option("state_file", state_file)->required();
    distill->add_option("--engine", engine)->check(CLI::IsMember({"exact", "mc"}));
    distill->add_option("--samples", samples);
    distill->add_option("--seed", seed);
    distill->add_option("--threads", threads);
    distill->add_option("--out", out_path, "Write result JSON here instead of stdout");

    CLI::App* sweep = app.add_subcommand("sweep", "nu_out = f(nu_in) curve as CSV");
    sweep->add_option("code_file", code_file)->required();
    sweep->add_option("--face", face)->expected(2);
    sweep->add_option("--nu-min", nu_min);
    sweep->add_option("--nu-max", nu_max);
    sweep->add_option("--steps", steps)->check(CLI::Range(2, 1000000));
    sweep->add_option("--threads", threads);
    sweep->add_option("--out", out_path, "Write CSV here instead of stdout");

    CLI::App* witness = app.add_subcommand("witness", "Contextuality witness report");
    witness->add_option("state_file", state_file)->required();
    witness->add_option("--face", face)->expected(2);
    witness->add_option("--ancilla", ancilla_file, "Ancilla state file (default maximally mixed)");
    witness->add_option("--out", out_path, "Write report JSON here instead of stdout");

    CLI::App* theorem2 = app.add_subcommand("theorem2", "Random-code gap dichotomy table");
    theorem2->add_option("--d", d);
    theorem2->add_option("--n-max", n_max)->check(CLI::Range(2, 16));
    theorem2->add_option("--codes", codes)->check(CLI::NonNegativeNumber);
    theorem2->add_option("--seed", seed);
    theorem2->add_option("--threads", threads);

    CLI::App* graph = app.add_subcommand("graph", "Exclusivity graph export and solve");
    graph->add_option("--d", d);
    graph->add_option("--face", face)->expected(2);
    graph->add_option("--out", out_path, "DIMACS output path");
    graph->add_flag("--solve-mis", solve_mis);
    graph->add_option("--budget", budget);
    graph->add_option("--threads", threads);

    CLI11_PARSE(app, argc, argv);

    try {
        if (canonicalize->parsed()) return run_canonicalize(code_file, out_path, argc, argv);
        if (distill->parsed()) {
            return run_distill(code_file, state_file, engine, samples, seed, threads, out_path,
                               argc, argv);
        }
        if (sweep->parsed()) {
            return run_sweep(code_file, face[0], face[1], nu_min, nu_max, steps, threads, out_path,
                             argc, argv);
        }
        if (witness->parsed()) {
            return run_witness(state_file, face[0], face[1], ancilla_file, out_path, argc, argv);
        }
        if (theorem2->parsed()) return run_theorem2(d, n_max, codes, seed, threads, argc, argv);
        if (graph->parsed()) {
            return run_graph(d, face[0], face[1], out_path, solve_mis, budget, threads, argc, argv);
        }
    } catch (const qmsd::ZeroAcceptanceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const qmsd::NegativeInputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const qmsd::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const qmsd::InvalidCodeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const qmsd::ShapeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const qmsd::DimensionMismatchError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const qmsd::BudgetExceededError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

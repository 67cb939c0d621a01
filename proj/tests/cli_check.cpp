// End-to-end checks of the command-line binary: formats, exit codes,
// manifests and rerun determinism.  argv[1] is the path to the binary.

#include <sys/stat.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

int checks = 0;
int failed = 0;

void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
        ++failed;
        std::fprintf(stderr, "FAILED: %s\n", what.c_str());
    }
}

std::string g_binary;
std::string g_dir;

std::string path_in_dir(const std::string& name) { return g_dir + "/" + name; }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool file_exists(const std::string& path) {
    struct stat st{};
    return ::stat(path.c_str(), &st) == 0;
}

// Runs the binary with the given arguments, capturing stdout/stderr.
// Returns the process exit code.
int run(const std::string& args, std::string* out = nullptr, std::string* err = nullptr,
        const std::string& env_prefix = "") {
    const std::string out_path = path_in_dir("stdout.tmp");
    const std::string err_path = path_in_dir("stderr.tmp");
    const std::string cmd = env_prefix + g_binary + " " + args + " > " + out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    if (out) *out = read_file(out_path);
    if (err) *err = read_file(err_path);
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -2;
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

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const char* kZzCode = R"({"d": 3, "N": 2, "rows": [[1, 1, 0, 0]], "syndrome": [0]})";
const char* kZiCode = R"({"d": 3, "N": 2, "rows": [[1, 0, 0, 0]], "syndrome": [0]})";
const char* kUniformState = R"({"d": 3, "N": 1, "values": [0.1111111111111111, 0.1111111111111111, 0.1111111111111111, 0.1111111111111111, 0.1111111111111111, 0.1111111111111111, 0.1111111111111111, 0.1111111111111111, 0.1111111111111112]})";
// (|1> - |2>)/sqrt(2) as a dense matrix
const char* kNegativeDense = R"({"d": 3, "re": [[0, 0, 0], [0, 0.5, -0.5], [0, -0.5, 0.5]], "im": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]})";
// same state as a quasidistribution
const char* kNegativeWigner = R"({"d": 3, "N": 1, "values": [-0.33333333333333331, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666]})";
// support only at (z, x) = (0, 1): incompatible with x1 + x2 = 0
const char* kOffCodeState = R"({"d": 3, "N": 1, "values": [0, 1, 0, 0, 0, 0, 0, 0, 0]})";

void check_canonicalize() {
    write_file(path_in_dir("zz.json"), kZzCode);
    write_file(path_in_dir("zi.json"), kZiCode);

    std::string out;
    expect(run("canonicalize " + path_in_dir("zz.json"), &out) == 0, "canonicalize zz exits 0");
    auto j = nlohmann::json::parse(out);
    expect(j["trivial"] == false, "zz is nontrivial");
    expect(j["n"] == 1 && j["m"] == 0, "zz block ranks");
    expect(j["vec_a"] == nlohmann::json::array({1}), "zz vec_a");

    expect(run("canonicalize " + path_in_dir("zi.json"), &out) == 0, "canonicalize zi exits 0");
    expect(nlohmann::json::parse(out)["trivial"] == true, "zi is trivial");

    write_file(path_in_dir("bad.json"), "{broken");
    std::string err;
    expect(run("canonicalize " + path_in_dir("bad.json"), &out, &err) == 2, "parse failure exits 2");
    expect(err.find("error:") != std::string::npos, "parse failure reports on stderr");
    expect(run("canonicalize " + path_in_dir("missing.json"), &out, &err) == 2, "missing file exits 2");
}

void check_distill_exact() {
    write_file(path_in_dir("mix.json"),
               R"({"d": 3, "N": 1, "values": [0.05, 0.1, 0.15, 0.2, 0.05, 0.1, 0.15, 0.1, 0.1]})");
    const std::string out_path = path_in_dir("ident.json");
    expect(run("distill " + path_in_dir("zi.json") + " " + path_in_dir("mix.json") +
               " --engine exact --out " + out_path) == 0,
           "exact distill exits 0");

    const std::string content = read_file(out_path);
    auto j = nlohmann::json::parse(content);
    expect(j["engine"] == "exact", "exact engine recorded");
    // trivial code: output equals input
    const std::vector<double> in_vals = {0.05, 0.1, 0.15, 0.2, 0.05, 0.1, 0.15, 0.1, 0.1};
    bool same = true;
    for (int c = 0; c < 9; ++c)
        same = same && std::abs(j["w_out"]["values"][c].get<double>() - in_vals[c]) < 1e-12;
    expect(same, "trivial code output equals input");

    const std::string manifest_path = out_path + ".manifest.json";
    expect(file_exists(manifest_path), "manifest written next to the output");
    auto m = nlohmann::json::parse(read_file(manifest_path));
    expect(m["command"] == "distill", "manifest records the command");
    expect(m["version"] == "0.1.0", "manifest records the version");
    expect(m["outputs"][0]["fnv1a64"] == hex64(fnv1a64(content)), "manifest digest matches the file");

    // zero acceptance exits 3
    write_file(path_in_dir("off.json"), kOffCodeState);
    std::string err;
    expect(run("distill " + path_in_dir("zz.json") + " " + path_in_dir("off.json") +
               " --engine exact", nullptr, &err) == 3,
           "zero acceptance exits 3");
}

void check_distill_mc() {
    write_file(path_in_dir("uniform.json"), kUniformState);
    write_file(path_in_dir("neg.json"), kNegativeWigner);

    std::string err;
    expect(run("distill " + path_in_dir("zz.json") + " " + path_in_dir("neg.json") +
               " --engine mc --samples 1000", nullptr, &err) == 4,
           "negative sampler input exits 4");

    const std::string a = path_in_dir("mc_a.json");
    const std::string b = path_in_dir("mc_b.json");
    const std::string c = path_in_dir("mc_c.json");
    const std::string base_cmd = "distill " + path_in_dir("zz.json") + " " + path_in_dir("uniform.json") +
                                 " --engine mc --samples 20000 --seed 7 --out ";
    expect(run(base_cmd + a) == 0, "mc run exits 0");
    expect(run(base_cmd + b) == 0, "mc rerun exits 0");
    expect(run(base_cmd + c, nullptr, nullptr, "QMSD_THREADS=3 ") == 0, "mc run with env thread count");
    expect(read_file(a) == read_file(b), "same seed reruns are byte-identical");
    expect(read_file(a) == read_file(c), "worker count does not change the result");

    auto j = nlohmann::json::parse(read_file(a));
    expect(j["engine"] == "mc", "mc engine recorded");
    expect(j["samples"] == 20000, "sample count recorded");
    expect(j["seed"] == 7, "seed recorded");
    expect(j["generator"] == "mt19937_64", "generator name recorded");
    expect(j["accepted"].get<uint64_t>() > 5000, "acceptance near 1/3 of 20000");
    auto m = nlohmann::json::parse(read_file(a + ".manifest.json"));
    expect(m["parameters"]["seed"] == 7, "manifest records the seed");
}

void check_sweep() {
    const std::string out_path = path_in_dir("sweep.csv");
    // three-point grid whose midpoint is exactly fl(1/9)
    expect(run("sweep " + path_in_dir("zz.json") +
               " --face 0 0 --nu-min 0 --nu-max 0.22222222222222221 --steps 3 --out " + out_path) == 0,
           "sweep exits 0");
    const auto rows = parse_csv(read_file(out_path));
    expect(rows.size() == 4, "header plus three rows");
    expect(rows[0] == std::vector<std::string>{"nu_in", "nu_out", "acceptance_probability"},
           "csv header");
    expect(std::abs(std::stod(rows[2][0]) - 1.0 / 9.0) < 1e-16, "midpoint grid value is 1/9");
    expect(std::abs(std::stod(rows[2][1]) - 1.0 / 9.0) < 1e-12, "uniform value is a fixed point");
    expect(std::abs(std::stod(rows[2][2]) - 1.0 / 3.0) < 1e-12, "fixed point acceptance 1/3");

    // trivial code: nu_out == nu_in on every row
    const std::string ident_path = path_in_dir("sweep_ident.csv");
    expect(run("sweep " + path_in_dir("zi.json") +
               " --face 1 2 --nu-min -0.3 --nu-max 0.96 --steps 22 --out " + ident_path) == 0,
           "trivial sweep exits 0");
    const auto ident_rows = parse_csv(read_file(ident_path));
    expect(ident_rows.size() == 23, "trivial sweep row count");
    bool identity = true;
    for (size_t r = 1; r < ident_rows.size(); ++r)
        identity = identity && std::abs(std::stod(ident_rows[r][1]) - std::stod(ident_rows[r][0])) < 1e-12;
    expect(identity, "trivial sweep is the identity");
}

void check_witness() {
    write_file(path_in_dir("neg_dense.json"), kNegativeDense);

    std::string out;
    expect(run("witness " + path_in_dir("neg_dense.json") + " --face 0 0", &out) == 0,
           "witness on a dense state exits 0");
    auto j = nlohmann::json::parse(out);
    expect(j["contextual"] == true, "negative state is contextual");
    expect(std::abs(j["value"].get<double>() - 28.0) < 1e-9, "witness value 28");
    expect(j["bound"] == 27.0, "witness bound 27");
    expect(j["face"] == nlohmann::json::array({0, 0}), "witness face");

    // the same state as a quasidistribution gives the same verdict
    expect(run("witness " + path_in_dir("neg.json") + " --face 0 0", &out) == 0,
           "witness on a quasidistribution exits 0");
    auto j2 = nlohmann::json::parse(out);
    expect(std::abs(j2["value"].get<double>() - j["value"].get<double>()) < 1e-9,
           "dense and quasidistribution inputs agree");

    expect(run("witness " + path_in_dir("uniform.json") + " --face 0 0", &out) == 0,
           "witness on the uniform state exits 0");
    expect(nlohmann::json::parse(out)["contextual"] == false, "uniform state is not contextual");

    // explicit ancilla must leave the value unchanged
    expect(run("witness " + path_in_dir("neg_dense.json") + " --face 0 0 --ancilla " +
               path_in_dir("mix.json"), &out) == 0,
           "witness with explicit ancilla exits 0");
    expect(std::abs(nlohmann::json::parse(out)["value"].get<double>() - 28.0) < 1e-9,
           "witness value is ancilla-independent");
}

void check_graph() {
    const std::string out_path = path_in_dir("graph.dimacs");
    std::string out;
    expect(run("graph --d 3 --face 0 0 --out " + out_path + " --solve-mis --budget 600", &out) == 0,
           "graph exits 0");
    expect(out.find("vertices: 240, edges: 7116") != std::string::npos, "graph size line");
    expect(out.find("independence_number: 27") != std::string::npos, "independence number line");
    const std::string dimacs = read_file(out_path);
    expect(dimacs.rfind("p edge 240 7116", 0) == 0, "dimacs preamble");
    auto m = nlohmann::json::parse(read_file(out_path + ".manifest.json"));
    expect(m["command"] == "graph", "graph manifest command");
    expect(m["outputs"][0]["fnv1a64"] == hex64(fnv1a64(dimacs)), "graph manifest digest");
}

void check_theorem2() {
    std::string first, second;
    expect(run("theorem2 --d 3 --n-max 3 --codes 5 --seed 11", &first) == 0, "theorem2 exits 0");
    expect(run("theorem2 --d 3 --n-max 3 --codes 5 --seed 11", &second) == 0, "theorem2 rerun exits 0");
    expect(first == second, "theorem2 output is deterministic");
    expect(first.find("digest,N,trivial,min_gap") != std::string::npos, "theorem2 header");
    expect(first.find("codes: 5") != std::string::npos, "theorem2 code count");
    expect(first.find("dichotomy_failures: 0") != std::string::npos, "theorem2 dichotomy holds");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-cli-binary>\n", argv[0]);
        return 64;
    }
    g_binary = argv[1];

    char tmpl[] = "/tmp/qmsd_cli_XXXXXX";
    char* dir = mkdtemp(tmpl);
    if (!dir) {
        std::fprintf(stderr, "mkdtemp failed\n");
        return 65;
    }
    g_dir = dir;

    check_canonicalize();
    check_distill_exact();
    check_distill_mc();
    check_sweep();
    check_witness();
    check_graph();
    check_theorem2();

    std::printf("cli checks: %d run, %d failed\n", checks, failed);
    return failed == 0 ? 0 : 1;
}

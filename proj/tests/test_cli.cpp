#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef SYSDSE_CLI
#error "SYSDSE_CLI must name the sysdse executable"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SYSDSE_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sysdse_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("labels command") {
    TempDir d;
    CHECK(run("labels --case 2 -o " + (d / "c2.json")).code == 0);
    CHECK(nlohmann::json::parse(slurp(d / "c2.json"))["entries"].size() == 1000);
    CHECK(fs::exists(d / "c2.json.manifest.json"));

    std::ofstream(d / "platform.json") << R"({"units":[{"rows":128,"cols":128},{"rows":32,"cols":32},{"rows":256,"cols":16},{"rows":16,"cols":256}]})";
    CHECK(run("labels --case 3 --platform " + (d / "platform.json") + " -o " + (d / "c3.json")).code == 0);
    CHECK(nlohmann::json::parse(slurp(d / "c3.json"))["entries"].size() == 1944);

    CHECK(run("labels --case 1 --max-mac-exp 8 -o " + (d / "c1.json")).code == 0);
    CHECK(nlohmann::json::parse(slurp(d / "c1.json"))["entries"].size() == 3);

    const auto manifest = nlohmann::json::parse(slurp(d / "c1.json.manifest.json"));
    CHECK(manifest["subcommand"] == "labels");
    CHECK(manifest.contains("duration_s"));

    CHECK(run("labels --case 4 -o " + (d / "x.json")).code == 1);
    CHECK(run("labels --case 1 --max-mac-exp 7 -o " + (d / "x.json")).code == 1);
    CHECK(run("labels --case 1 -o /nonexistent/dir/x.json").code == 2);
    CHECK(run("frobnicate").code == 1);
}

TEST_CASE("gen is reproducible and readable") {
    TempDir d;
    REQUIRE(run("gen --case 1 -n 1000 --seed 7 --threads 1 -o " + (d / "a.csv")).code == 0);
    REQUIRE(run("gen --case 1 -n 1000 --seed 7 --threads 3 -o " + (d / "b.csv")).code == 0);
    const auto a = slurp(d / "a.csv");
    CHECK(a == slurp(d / "b.csv"));
    CHECK(a.rfind("m,n,k,mac_exp,label\n", 0) == 0);
    CHECK(count_lines(a) == 1001);
    const auto manifest = nlohmann::json::parse(slurp(d / "a.csv.manifest.json"));
    CHECK(manifest["subcommand"] == "gen");

    // The manifest's resolved parameters regenerate the same bytes.
    CHECK(run("stats -i " + (d / "a.csv") + " -o " + (d / "h.csv")).code == 0);
    double sum = 0;
    std::istringstream hist(slurp(d / "h.csv"));
    std::string line;
    std::getline(hist, line);
    CHECK(line == "label,frequency");
    while (std::getline(hist, line)) sum += std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("pca command") {
    TempDir d;
    {
        std::ofstream f(d / "line.csv");
        f << "a,b,label\n";
        for (int i = 0; i < 12; ++i) f << i << "," << i << "," << i % 2 << "\n";
    }
    const auto r = run("pca -i " + (d / "line.csv") + " --classes 0,1 -o " + (d / "p.csv"));
    CHECK(r.code == 0);
    CHECK(r.out.find("pc1: 0.707107 0.707107") != std::string::npos);
    CHECK(count_lines(slurp(d / "p.csv")) == 13);
    CHECK(run("pca -i " + (d / "line.csv") + " --classes 0,5 -o " + (d / "p.csv")).code == 2);
}

TEST_CASE("train, predict and eval") {
    TempDir d;
    REQUIRE(run("gen --case 1 -n 600 --seed 3 -o " + (d / "tr.csv")).code == 0);
    REQUIRE(run("gen --case 1 -n 200 --seed 4 -o " + (d / "te.csv")).code == 0);
    const auto t = run("train --case 1 -i " + (d / "tr.csv") + " -o " + (d / "m.bin") +
                       " --epochs 3 --hidden 16 --seed 5 --log " + (d / "log.csv"));
    REQUIRE(t.code == 0);
    CHECK(count_lines(t.out) == 4);
    CHECK(t.out.rfind("epoch,train_loss,train_acc,val_acc\n", 0) == 0);
    CHECK(slurp(d / "log.csv") == t.out);
    REQUIRE(run("train --case 1 -i " + (d / "tr.csv") + " -o " + (d / "m2.bin") + " --epochs 3 --hidden 16 --seed 5").code == 0);
    CHECK(slurp(d / "m.bin") == slurp(d / "m2.bin"));

    const auto p = run("predict -m " + (d / "m.bin") + " --input 1024,256,64,14");
    CHECK(p.code == 0);
    CHECK(p.out.find("rows=") != std::string::npos);
    CHECK(p.out.find("dataflow=") != std::string::npos);
    CHECK(run("predict -m " + (d / "m.bin") + " --input 1024,256,64").code == 1);
    CHECK(run("predict -m " + (d / "m.bin") + " --input 0,256,64,14").code == 1);

    const auto e = run("eval -m " + (d / "m.bin") + " -i " + (d / "te.csv") + " -r " + (d / "r.json") + " --hist " + (d / "h.csv"));
    CHECK(e.code == 0);
    const auto rep = nlohmann::json::parse(slurp(d / "r.json"));
    CHECK(rep["count"] == 200);
    CHECK(rep["geomean"].get<double>() > 0.0);
    CHECK(slurp(d / "h.csv").rfind("label,actual,predicted\n", 0) == 0);

    // Predictions equal to the labels.
    {
        std::ifstream in(d / "te.csv");
        std::ofstream out(d / "labels.txt");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) out << line.substr(line.rfind(',') + 1) << "\n";
    }
    CHECK(run("eval --case 1 --predictions " + (d / "labels.txt") + " -i " + (d / "te.csv") + " -r " + (d / "r2.json")).code == 0);
    CHECK(nlohmann::json::parse(slurp(d / "r2.json"))["accuracy"] == 1.0);

    // Model and dataset from different cases.
    REQUIRE(run("gen --case 3 -n 20 --seed 1 -o " + (d / "c3.csv")).code == 0);
    CHECK(run("eval -m " + (d / "m.bin") + " -i " + (d / "c3.csv") + " -r " + (d / "r3.json")).code == 1);

    // Truncated checkpoint.
    const auto bytes = slurp(d / "m.bin");
    std::ofstream(d / "cut.bin", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    CHECK(run("predict -m " + (d / "cut.bin") + " --input 1024,256,64,14").code == 2);
}

TEST_CASE("corrupt datasets exit with code 2") {
    TempDir d;
    std::ofstream(d / "bad.csv") << "m,n,k,mac_exp,label\n1,1,1,8,500\n";
    CHECK(run("stats -i " + (d / "missing.csv") + " -o " + (d / "h.csv")).code == 2);
    CHECK(run("train --case 1 -i " + (d / "bad.csv") + " -o " + (d / "m.bin")).code == 2);
}

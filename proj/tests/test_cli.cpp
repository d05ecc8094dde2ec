#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SANSCRYPT_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sanscrypt_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string s27_path() { return testutil::bench_dir() + "/s27.bench"; }

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

}  // namespace

TEST_CASE("stats prints the four counts") {
    const auto r = run("stats " + s27_path());
    CHECK(r.code == 0);
    CHECK(r.out.starts_with("s27 4/1/3/10"));
}

TEST_CASE("analytic models") {
    const auto bf = run("model brute-force --i 32 --c 8 --n 10");
    CHECK(bf.code == 0);
    CHECK(bf.out.starts_with("2^265 = "));
    CHECK(bf.out.find("5.93e79") != std::string::npos);
    const auto cd = run("model cycle-delay --ta 8 --n 11");
    CHECK(cd.code == 0);
    CHECK(cd.out == "overhead 1/128 = 0.781250%\n");
    const auto sweep = run("model cycle-delay --sweep");
    CHECK(sweep.code == 0);
    CHECK(sweep.out.starts_with("t_a,n,overhead,percent\n8,1,8,800.000000%\n"));
    CHECK(run("model cycle-delay --ta 8").code == 1);
}

TEST_CASE("exit codes") {
    CHECK(run("").code == 1);
    CHECK(run("bogus").code == 1);
    CHECK(run("stats").code == 1);
    CHECK(run("stats --frobnicate " + s27_path()).code == 1);
    CHECK(run("stats /nonexistent/none.bench").code == 2);
    CHECK(run("model brute-force --i 1 --c 1 --n 1 --extra").code == 1);
    TempDir dir;
    write(dir.file("bad.bench"), "INPUT(a)\ny = FOO(a)\n");
    CHECK(run("stats " + dir.file("bad.bench")).code == 2);
}

TEST_CASE("--help documents every subcommand's flags") {
    const auto top = run("--help");
    CHECK(top.code == 0);
    for (const char* sub : {"stats", "encrypt", "simulate", "eval-hd", "attack", "model"}) {
        CHECK(top.out.find(sub) != std::string::npos);
    }
    const auto enc = run("encrypt --help");
    CHECK(enc.code == 0);
    for (const char* flag : {"--config", "--out", "--keys", "--report"}) CHECK(enc.out.find(flag) != std::string::npos);
    const auto ev = run("eval-hd --help");
    for (const char* flag : {"--keys", "--cases", "--vectors", "--cycles", "--seed", "--csv", "--json", "--workers"}) {
        CHECK(ev.out.find(flag) != std::string::npos);
    }
    const auto at = run("attack --help");
    for (const char* flag : {"--oracle", "--keys-timing", "--max-seq", "--budget", "--observe", "--seed", "--dimacs"}) {
        CHECK(at.out.find(flag) != std::string::npos);
    }
    const auto sim = run("simulate --help");
    for (const char* flag : {"--keys", "--case", "--cycles", "--seed", "--vcd"}) CHECK(sim.out.find(flag) != std::string::npos);
    CHECK(run("model cycle-delay --help").out.find("--sweep") != std::string::npos);
}

TEST_CASE("encrypt, eval-hd, simulate and attack end to end") {
    TempDir dir;
    write(dir.file("cfg.json"), R"({"lfsr_width": 5, "enc_out_width": 3, "key_len": 8, "sbj_bits": 2, "coverage": 0.2, "master_seed": 1})");
    const std::string enc_args = "encrypt " + s27_path() + " --config " + dir.file("cfg.json");
    const auto e1 = run(enc_args + " --out " + dir.file("a.bench") + " --keys " + dir.file("a.json") + " --report " + dir.file("r.json"));
    const auto e2 = run(enc_args + " --out " + dir.file("b.bench") + " --keys " + dir.file("b.json"));
    REQUIRE(e1.code == 0);
    REQUIRE(e2.code == 0);
    CHECK(e1.out == e2.out);
    CHECK(e1.out.starts_with("xor_sites 2\n"));
    CHECK(slurp(dir.file("a.bench")) == slurp(dir.file("b.bench")));
    CHECK(slurp(dir.file("a.json")) == slurp(dir.file("b.json")));
    CHECK(run("stats " + dir.file("a.bench")).code == 0);

    const std::string eval = "eval-hd " + s27_path() + " " + dir.file("a.bench") + " --keys " + dir.file("a.json") +
                             " --vectors 100 --cycles 500 --seed 9";
    const auto h1 = run(eval + " --csv " + dir.file("h1.csv") + " --json " + dir.file("h1.json"));
    const auto h2 = run(eval + " --workers 3 --csv " + dir.file("h2.csv") + " --json " + dir.file("h2.json"));
    REQUIRE(h1.code == 0);
    CHECK(h1.out == h2.out);
    CHECK(slurp(dir.file("h1.csv")) == slurp(dir.file("h2.csv")));
    CHECK(slurp(dir.file("h1.json")) == slurp(dir.file("h2.json")));
    CHECK(h1.out.starts_with("case1 mean_hd 0.000000"));
    const auto only1 = run(eval + " --cases 1");
    CHECK(only1.out.starts_with("case1 mean_hd 0.000000 (100 runs"));
    CHECK(run(eval + " --cases 4").code == 1);

    const auto s1 = run("simulate " + dir.file("a.bench") + " --keys " + dir.file("a.json") + " --case 1 --cycles 30 --vcd " +
                        dir.file("t.vcd"));
    CHECK(s1.code == 0);
    CHECK(s1.out == run("simulate " + dir.file("a.bench") + " --keys " + dir.file("a.json") + " --case 1 --cycles 30").out);
    CHECK(slurp(dir.file("t.vcd")).find("$enddefinitions") != std::string::npos);

    const auto at = run("attack " + dir.file("a.bench") + " --oracle " + s27_path() + " --keys-timing " + dir.file("a.json") +
                        " --max-seq 1 --dimacs " + dir.file("w0.cnf"));
    CHECK(at.code == 0);
    CHECK(at.out.find("recovered") != std::string::npos);
    CHECK(at.out.find("matches the key schedule") != std::string::npos);
    CHECK(slurp(dir.file("w0.cnf")).starts_with("p cnf "));
    const auto derived = run("attack " + dir.file("a.bench") + " --oracle " + s27_path() + " --keys-timing derive --c 8 --max-seq 1");
    CHECK(derived.code == 0);
    CHECK(run("attack " + dir.file("a.bench") + " --oracle " + s27_path() + " --keys-timing derive --max-seq 1").code == 2);
    const auto budget = run("attack " + dir.file("a.bench") + " --oracle " + s27_path() + " --keys-timing " + dir.file("a.json") +
                            " --max-seq 2 --budget 0");
    CHECK(budget.code == 3);
}

TEST_CASE("bad configuration files are input errors") {
    TempDir dir;
    write(dir.file("cfg.json"), R"({"coverage": 2.0})");
    CHECK(run("encrypt " + s27_path() + " --config " + dir.file("cfg.json") + " --out " + dir.file("o.bench") + " --keys " +
              dir.file("k.json"))
              .code == 2);
}

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "mel/cli.hpp"

using namespace mel;

namespace {

int run(std::initializer_list<const char*> args, std::string& out, std::string& err) {
    std::vector<const char*> argv{"mel"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream o, e;
    int rc = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    err = e.str();
    return rc;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::string("/tmp/mel_test_") + name;
        std::ofstream f(path);
        f << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("config parsing: text and json") {
    TempFile txt("cfg.txt",
                 "# baseline household\n"
                 "k = 8\n"
                 "alpha = 0.6\n"
                 "t_l = 2\n"
                 "t_h = 3\n"
                 "c = 0.25\n"
                 "lambda = 1\n"
                 "r = 1\n");
    RunConfig cfg = load_config_file(txt.path);
    CHECK(cfg.has_household);
    CHECK_FALSE(cfg.has_payoffs);
    CHECK(cfg.k == 8.0);
    CHECK(cfg.cd_share == 0.6);

    TempFile js("cfg.json", R"({"phi_hh": 7, "phi_hl": 6, "phi_lh": 3, "phi_ll": 1, "c": 2})");
    RunConfig jcfg = load_config_file(js.path);
    CHECK(jcfg.has_payoffs);
    CHECK(jcfg.phi.hh == 7.0);
    CHECK(jcfg.c == 2.0);

    TempFile bad("bad.txt", "nonsense_key = 1\n");
    CHECK_THROWS_AS(load_config_file(bad.path), ConfigError);
}

TEST_CASE("exactly one economy source") {
    RunConfig cfg;
    CHECK_THROWS_AS(economy_from(cfg), ConfigError);  // neither source
    apply_config_entry(cfg, "phi_hh", "7");
    apply_config_entry(cfg, "phi_hl", "6");
    apply_config_entry(cfg, "phi_lh", "3");
    apply_config_entry(cfg, "phi_ll", "1");
    apply_config_entry(cfg, "k", "8");  // both sources now
    CHECK_THROWS_AS(economy_from(cfg), ConfigError);
}

TEST_CASE("payoffs command reproduces the published row") {
    TempFile cfg("hh.txt", "k = 8\nalpha = 0.6\nt_l = 2\nc = 0.25\n");
    std::string out, err;
    int rc = run({"payoffs", "--config", cfg.path.c_str(), "--t-h", "3"}, out, err);
    CHECK(rc == 0);
    CHECK(out.find("5.3547 5.2733 4.7733 3.4085") != std::string::npos);
    CHECK(out.find("ranking: ok") != std::string::npos);

    rc = run({"payoffs", "--config", cfg.path.c_str(), "--t-h", "6.5"}, out, err);
    CHECK(rc == 0);
    CHECK(out.find("9.0660 8.9847 8.4847 3.4085") != std::string::npos);

    // equal wages: all four entries coincide
    rc = run({"payoffs", "--config", cfg.path.c_str(), "--t-h", "2"}, out, err);
    CHECK(rc == 0);
    CHECK(out.find("3.4085 3.4085 3.4085 3.4085") != std::string::npos);
}

TEST_CASE("solve command on the published environments") {
    TempFile cfg1("e1.txt", "phi_hh = 7\nphi_hl = 6\nphi_lh = 3\nphi_ll = 1\nc = 2\n");
    std::string out, err;
    int rc = run({"solve", "--config", cfg1.path.c_str()}, out, err);
    CHECK(rc == 0);
    CHECK(out.find("SymmetricAM") != std::string::npos);
    CHECK(out.find("0.3333") != std::string::npos);
    CHECK(out.find("FIOS") == std::string::npos);

    TempFile cfg2("e2.txt", "phi_hh = 11\nphi_hl = 10\nphi_lh = 6\nphi_ll = 1\nc = 2\n");
    rc = run({"solve", "--config", cfg2.path.c_str()}, out, err);
    CHECK(rc == 0);
    CHECK(out.find("FIOS") != std::string::npos);
    CHECK(out.find("theta_w=0.5000") != std::string::npos);

    TempFile cfg3("hh65.txt", "k = 8\nalpha = 0.6\nt_l = 2\nt_h = 6.5\nc = 0.25\n");
    rc = run({"solve", "--config", cfg3.path.c_str()}, out, err);
    CHECK(rc == 0);
    CHECK(out.find("FIOS") != std::string::npos);
    CHECK(out.find("theta_w=0.0407") != std::string::npos);
}

TEST_CASE("sweep emits the mandatory header and regime transitions") {
    TempFile cfg("hh.txt", "k = 8\nalpha = 0.6\nt_l = 2\nc = 0.25\n");
    std::string out, err;
    int rc = run({"sweep", "--config", cfg.path.c_str(), "--grid", "2:0.5:8"}, out, err);
    CHECK(rc == 0);
    CHECK(out.rfind("t_h,phi_hh,phi_hl,phi_lh,phi_ll,delta,delta_h,theta_sym,theta_lb,"
                    "theta_ub,phi_constraint,one_plus_lr_delta,regime\n",
                    0) == 0);
    int rows = -1;  // header
    for (char ch : out)
        if (ch == '\n') ++rows;
    CHECK(rows == 13);
    CHECK(out.find("symmetric-only") != std::string::npos);
    CHECK(out.find("multiplicity-window") != std::string::npos);
    CHECK(out.find("fios-only") != std::string::npos);
}

TEST_CASE("thresholds command") {
    TempFile cfg("hh.txt", "k = 8\nalpha = 0.6\nt_l = 2\nc = 0.25\n");
    std::string out, err;
    int rc = run({"thresholds", "--config", cfg.path.c_str()}, out, err);
    CHECK(rc == 0);
    CHECK(out.find("t_sym  = 3.48") != std::string::npos);
    CHECK(out.find("t_fios = 6.1") != std::string::npos);
}

TEST_CASE("simulate is byte-deterministic given config and seed") {
    TempFile cfg("sim.txt",
                 "phi_hh = 7\nphi_hl = 6\nphi_lh = 3\nphi_ll = 1\nc = 2\n"
                 "n_agents = 500\nreplications = 3\nhorizon = 15\n");
    std::string out1, out2, err;
    CHECK(run({"simulate", "--config", cfg.path.c_str(), "--seed", "42"}, out1, err) == 0);
    CHECK(run({"simulate", "--config", cfg.path.c_str(), "--seed", "42"}, out2, err) == 0);
    CHECK(out1 == out2);
    CHECK(out1.find("V(m,H)") != std::string::npos);
}

TEST_CASE("json and csv formats, file output") {
    TempFile cfg("e1.txt", "phi_hh = 7\nphi_hl = 6\nphi_lh = 3\nphi_ll = 1\nc = 2\n");
    std::string out, err;
    CHECK(run({"solve", "--config", cfg.path.c_str(), "--format", "json"}, out, err) == 0);
    CHECK(out.find("\"kind\": \"SymmetricAM\"") != std::string::npos);
    CHECK(run({"solve", "--config", cfg.path.c_str(), "--format", "csv"}, out, err) == 0);
    CHECK(out.rfind("kind,theta_m,theta_w,knife_edge\n", 0) == 0);

    std::string path = "/tmp/mel_test_out.csv";
    CHECK(run({"solve", "--config", cfg.path.c_str(), "--format", "csv", "--out", path.c_str()},
              out, err) == 0);
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str().rfind("kind,", 0) == 0);
    std::remove(path.c_str());
}

TEST_CASE("exit codes") {
    std::string out, err;
    CHECK(run({"unknown-command"}, out, err) == 1);
    CHECK(run({"solve"}, out, err) == 1);  // no economy source
    CHECK(run({"--format"}, out, err) == 1);
    CHECK(run({"payoffs", "--format", "yaml"}, out, err) == 1);
    CHECK(run({"solve", "--config", "/tmp/mel_test_absent.cfg"}, out, err) == 1);
    // precision override changes the table rendering
    TempFile cfg("e1.txt", "phi_hh = 7\nphi_hl = 6\nphi_lh = 3\nphi_ll = 1\nc = 2\n");
    CHECK(run({"solve", "--config", cfg.path.c_str(), "--precision", "6"}, out, err) == 0);
    CHECK(out.find("0.333333") != std::string::npos);
}

TEST_CASE("sweep output does not depend on the worker count") {
    TempFile cfg("hh.txt", "k = 8\nalpha = 0.6\nt_l = 2\nc = 0.25\n");
    std::string serial, parallel, err;
    setenv("MEL_THREADS", "1", 1);
    CHECK(run({"sweep", "--config", cfg.path.c_str(), "--grid", "2:0.25:8"}, serial, err) == 0);
    unsetenv("MEL_THREADS");
    CHECK(run({"sweep", "--config", cfg.path.c_str(), "--grid", "2:0.25:8"}, parallel, err) == 0);
    CHECK(serial == parallel);
}

TEST_CASE("verify command exits zero on a correct build") {
    std::string out, err;
    CHECK(run({"verify"}, out, err) == 0);
    CHECK(out.find("FAIL") == std::string::npos);
    CHECK(out.find("reference values reproduced") != std::string::npos);
}

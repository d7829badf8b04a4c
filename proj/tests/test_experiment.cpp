#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "glab/csv.hpp"
#include "glab/experiment.hpp"

using namespace glab;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "experiment = convergence\n"
    "model = dlpp\n"
    "s = 0.5\n"
    "n_list = [64,128]\n"
    "reps = 4\n"
    "master_seed = 1\n";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("glab_exp_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

RunRecord run_in(const std::string& text, const std::string& name, unsigned workers = 1) {
  RunOptions opt;
  opt.workers = workers;
  opt.output_dir = scratch(name).string();
  return run(Config::parse(text), opt);
}

std::map<std::string, std::string> digests(const RunRecord& r) {
  std::map<std::string, std::string> out;
  for (const auto& o : r.outputs) out[o.name] = o.sha256;
  return out;
}

int cli(const std::string& args, const std::string& env = "") {
  const auto command = env + " " + std::string(GLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Run, MinimalConvergenceGivesTwoRows) {
  const auto r = run_in(kMinimal, "minimal");
  ASSERT_EQ(r.exit_code, 0) << r.error_message;
  EXPECT_EQ(r.status, "ok");
  const auto table = parse_csv(read_file(r.output_dir + "/results.csv"));
  EXPECT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.cell(0, "n"), "64");
  EXPECT_TRUE(fs::exists(r.output_dir + "/summary.json"));
  EXPECT_TRUE(fs::exists(r.output_dir + "/run_record.json"));
  for (const auto& o : r.outputs) EXPECT_EQ(sha256_file(r.output_dir + "/" + o.name), o.sha256);
  EXPECT_EQ(r.config_hash, Config::parse(kMinimal).hash());
}

TEST(Run, RepeatedAndParallelRunsAreByteIdentical) {
  const auto a = run_in(kMinimal, "a", 1);
  const auto b = run_in(kMinimal, "b", 1);
  const auto c = run_in(kMinimal, "c", 8);
  EXPECT_EQ(digests(a), digests(b));
  EXPECT_EQ(digests(a), digests(c));
  EXPECT_EQ(digests(a).size(), 3u);
}

TEST(Run, EveryExperimentIsDeterministicAcrossWorkers) {
  const char* configs[] = {
      "experiment = shape-point\nn_list = 16,32\np = 2\nreps = 6\nmaster_seed = 2\n",
      "experiment = shape-curvature\nn = 24\nq_list = 0.1,0.2,0.3,0.4\nreps = 6\nmaster_seed = 2\n",
      "experiment = event-a\nn_list = 8,16\nm = 4\nreps = 6\ndump_fields = true\nmaster_seed = 2\n",
      "experiment = deviation-profile\nmodel = dfpp\nn_list = 8,16\nreps = 6\nmaster_seed = 2\n",
      "experiment = xi-fit\nn_list = 8,16,32,64\nreps = 6\nmaster_seed = 2\n",
      "experiment = containment\nn = 16\nwidth = 4\nreps = 6\nmaster_seed = 2\n",
      "experiment = lcs-profile\nmodel = lcs\nn_list = 8,16\nalphabet = 3\nreps = 6\nmaster_seed = 2\n",
      "experiment = oracle-suite\nreps = 3\nmaster_seed = 2\n",
      "experiment = resample-suite\nreps = 50\nmaster_seed = 2\n",
      "experiment = partition-suite\nreps = 20\nmaster_seed = 2\n",
  };
  int i = 0;
  for (const char* text : configs) {
    const auto a = run_in(text, "det1_" + std::to_string(i), 1);
    const auto b = run_in(text, "det8_" + std::to_string(i), 8);
    ++i;
    ASSERT_EQ(a.exit_code, 0) << text << a.error_message;
    EXPECT_EQ(digests(a), digests(b)) << text;
  }
}

TEST(Run, EventAFieldDump) {
  const auto r = run_in("experiment = event-a\nn_list = 8\nk = 2\nreps = 5\ndump_fields = true\n", "dump");
  ASSERT_EQ(r.exit_code, 0) << r.error_message;
  const auto fields = parse_csv(read_file(r.output_dir + "/event_a_fields.csv"));
  EXPECT_EQ(fields.rows.size(), 5u);
  EXPECT_EQ(fields.cell(0, "m"), "4");
}

TEST(Run, InvalidConfigIsExitTwo) {
  const auto r = run_in("experiment = convergence\ns = 1.5\nn_list = 64,128\nreps = 4\n", "invalid");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.status, "invalid_config");
  EXPECT_EQ(r.error_code, ErrorCode::invalid_argument);
  EXPECT_TRUE(r.outputs.empty());
  EXPECT_FALSE(fs::exists(r.output_dir + "/results.csv"));
  const auto record = Json::parse(read_file(r.output_dir + "/run_record.json"));
  EXPECT_EQ(record["error"]["code"], "invalid_argument");
}

TEST(Run, CapacityIsExitThree) {
  const auto r = run_in("experiment = deviation-profile\nn_list = 100\nreps = 2\nmax_cells = 1000\n", "capacity");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(r.status, "capacity");
}

TEST(Run, SeedOverrideChangesOutputs) {
  RunOptions opt;
  opt.output_dir = scratch("override").string();
  opt.master_seed = 99;
  const auto r = run(Config::parse(kMinimal), opt);
  ASSERT_EQ(r.exit_code, 0);
  auto expected = Config::parse(kMinimal);
  expected.set("master_seed", std::uint64_t{99});
  EXPECT_EQ(r.config_hash, expected.hash());
  EXPECT_NE(digests(r), digests(run_in(kMinimal, "plain")));
  EXPECT_EQ(parse_seed_override(nullptr), std::nullopt);
  EXPECT_EQ(parse_seed_override("12"), 12u);
  EXPECT_THROW(parse_seed_override("x"), DomainError);
}

TEST(Run, SeedsFollowTheExperimentTag) {
  EXPECT_EQ(experiment_seed(1, "convergence"), mix64(1, string_tag("convergence")));
  EXPECT_NE(experiment_seed(1, "convergence"), experiment_seed(1, "shape-point"));
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  const auto good = (dir / "good.conf").string();
  const auto bad = (dir / "bad.conf").string();
  write_file(good, kMinimal);
  write_file(bad, "experiment = convergence\ns = 1.5\nn_list = 64\nreps = 4\n");
  EXPECT_EQ(cli("run " + good + " --out " + (dir / "o1").string()), 0);
  EXPECT_EQ(cli("run " + good + " --workers 8 --out " + (dir / "o8").string()), 0);
  EXPECT_EQ(read_file((dir / "o1" / "results.csv").string()), read_file((dir / "o8" / "results.csv").string()));
  EXPECT_EQ(cli("run " + bad + " --out " + (dir / "bad").string()), 2);
  EXPECT_EQ(cli("run " + (dir / "missing.conf").string()), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("verify nope"), 2);
  EXPECT_EQ(cli("verify resample-suite --trials 30"), 0);
  EXPECT_EQ(cli("plot " + (dir / "o1" / "results.csv").string() + " --spec convergence"), 0);
  EXPECT_TRUE(fs::exists(dir / "o1" / "results.svg"));
  EXPECT_EQ(cli("plot " + (dir / "o1" / "results.csv").string() + " --spec deviation"), 2);
}

TEST(Cli, EnvironmentSeedOverride) {
  const auto dir = scratch("env");
  fs::create_directories(dir);
  const auto conf = (dir / "c.conf").string();
  write_file(conf, kMinimal);
  EXPECT_EQ(cli("run " + conf + " --out " + (dir / "plain").string()), 0);
  EXPECT_EQ(cli("run " + conf + " --out " + (dir / "same").string(), "GLAB_MASTER_SEED=1"), 0);
  EXPECT_EQ(cli("run " + conf + " --out " + (dir / "other").string(), "GLAB_MASTER_SEED=77"), 0);
  EXPECT_EQ(read_file((dir / "plain" / "results.csv").string()), read_file((dir / "same" / "results.csv").string()));
  EXPECT_NE(read_file((dir / "plain" / "results.csv").string()), read_file((dir / "other" / "results.csv").string()));
  EXPECT_EQ(cli("run " + conf + " --out " + (dir / "bad").string(), "GLAB_MASTER_SEED=oops"), 2);
}

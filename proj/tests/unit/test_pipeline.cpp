#include <mdsum/pipeline.hpp>

#include <gtest/gtest.h>
#include <test_support.hpp>

#include <cstdlib>
#include <set>
#include <sstream>

using namespace mdsum;
namespace fs = std::filesystem;
using testsupport::scratch_dir;
using testsupport::slurp;
using testsupport::write_file;

namespace {

RunConfig mini_config(const fs::path& out, Model m) {
  RunConfig c;
  c.model = m;
  c.corpus = (fs::path(MDSUM_DATA_DIR) / "minicorpus").string();
  c.stopwords = (fs::path(MDSUM_DATA_DIR) / "stopwords_en.txt").string();
  c.output = out.string();
  c.kb = (out / "kb.tsv").string();
  return c;
}

std::string all_outputs(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string s;
  for (const auto& f : files) {
    if (f.filename() == "effective.cfg") continue;  // holds the output path
    s += f.filename().string() + "\n" + slurp(f);
  }
  return s;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(MDSUM_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(FactorDump, RoundTrip) {
  auto d = scratch_dir("dump");
  write_file(d / "c" / "a.txt", "Solar panels cover the farm. The farm sells power. Panels track the sun.");
  write_file(d / "c" / "topic.txt", "solar farm power");
  auto pc = prepare_cluster(load_cluster(d / "c"), load_stopwords(fs::path(MDSUM_DATA_DIR) / "stopwords_en.txt"));
  auto fp = fit_nmf(pc.matrix.a, {2}, 1);
  auto dump = FactorDump::from(pc, fp);
  auto back = parse_factors(serialize_factors(dump));
  EXPECT_EQ(back.words, dump.words);
  EXPECT_EQ(back.factors.u, fp.u);
  EXPECT_EQ(back.factors.v, fp.v);
  EXPECT_EQ(back.occurrence, dump.occurrence);
  EXPECT_EQ(coherence(back.factors.u, back.occurrence, 3), coherence(fp.u, pc.matrix.a, 3));
  EXPECT_THROW(parse_factors(""), FormatError);
  EXPECT_THROW(parse_factors("#mdsum-factors v1\ndims\t1\t1\t1\n"), FormatError);
}

TEST(InspectTopics, PlantedBlocksGiveDisjointTopics) {
  auto pc = testsupport::planted_two_block(20, 16, 3);
  std::vector<std::string> words = pc.words;
  FactorDump d;
  d.words = words;
  d.factors = fit_nmf(pc.a, {2, 0.1, 0.1, 1000, 1e-9}, 5);
  d.occurrence = (pc.a.array() != 0.0).cast<double>().matrix();
  const auto text = inspect_topics(d, 10);
  std::istringstream in(text);
  std::string line;
  std::vector<std::set<int>> blocks;
  while (std::getline(in, line)) {
    std::set<int> b;
    auto tab = line.rfind('\t');
    std::istringstream ws(line.substr(tab + 1));
    std::string w;
    while (ws >> w) b.insert(std::stoi(w.substr(1)) < 10 ? 0 : 1);
    blocks.push_back(b);
  }
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].size(), 1u);
  EXPECT_EQ(blocks[1].size(), 1u);
  EXPECT_NE(*blocks[0].begin(), *blocks[1].begin());
  EXPECT_EQ(inspect_topics(d, 10), text);
}

TEST(Pipeline, DeterministicAndWithinBudget) {
  auto o1 = scratch_dir("det1");
  auto o2 = scratch_dir("det2");
  std::ostringstream log;
  ASSERT_EQ(run_summarize(mini_config(o1, Model::jltmmr_sf), log), kExitOk) << log.str();
  ASSERT_EQ(run_summarize(mini_config(o2, Model::jltmmr_sf), log), kExitOk) << log.str();
  EXPECT_EQ(all_outputs(o1), all_outputs(o2));
  for (const auto& dir : list_clusters(fs::path(MDSUM_DATA_DIR) / "minicorpus")) {
    const auto id = dir.filename().string();
    const auto summary = slurp(o1 / (id + ".summary.txt"));
    EXPECT_FALSE(summary.empty());
    EXPECT_LE(raw_word_count(summary), 250u);
    EXPECT_TRUE(fs::exists(o1 / (id + ".scores.tsv")));
    EXPECT_TRUE(fs::exists(o1 / (id + ".factors")));
  }
  EXPECT_TRUE(fs::exists(o1 / "evaluation.tsv"));
  EXPECT_TRUE(fs::exists(o1 / "corpus_stats.tsv"));
  EXPECT_EQ(parse_config(slurp(o1 / "effective.cfg")), mini_config(o1, Model::jltmmr_sf));
}

TEST(Pipeline, JltmmrReducesToJtmmr) {
  auto o1 = scratch_dir("red1");
  auto o2 = scratch_dir("red2");
  auto lt = mini_config(o1, Model::jltmmr);
  lt.alpha_ltm = 0.0;
  lt.gamma = 0.0;
  lt.use_column_weights = false;
  auto jt = mini_config(o2, Model::jtmmr);
  std::ostringstream log;
  ASSERT_EQ(run_summarize(lt, log), kExitOk);
  ASSERT_EQ(run_summarize(jt, log), kExitOk);
  for (const auto& dir : list_clusters(lt.corpus)) {
    const auto id = dir.filename().string();
    EXPECT_EQ(slurp(o1 / (id + ".summary.txt")), slurp(o2 / (id + ".summary.txt")));
  }
}

TEST(Pipeline, KnowledgeBaseAccumulatesAcrossRuns) {
  auto o = scratch_dir("kbrun");
  auto c = mini_config(o, Model::jltmmr);
  std::ostringstream log;
  ASSERT_EQ(run_summarize(c, log), kExitOk);
  const auto first = KnowledgeBase::load(c.kb);
  ASSERT_EQ(run_summarize(c, log), kExitOk);
  const auto second = KnowledgeBase::load(c.kb);
  EXPECT_GT(first.task_count(), 0u);
  EXPECT_GT(second.task_count(), first.task_count());
  for (const auto& [p, n] : first.pairs()) EXPECT_GE(second.pair_count(p.first, p.second), n);
}

TEST(Pipeline, ParallelMatchesSequential) {
  auto o1 = scratch_dir("par1");
  auto o2 = scratch_dir("par2");
  auto seq = mini_config(o1, Model::jtmmr);
  auto par = mini_config(o2, Model::jtmmr);
  par.jobs = 3;
  std::ostringstream log;
  ASSERT_EQ(run_summarize(seq, log), kExitOk);
  ASSERT_EQ(run_summarize(par, log), kExitOk);
  EXPECT_EQ(all_outputs(o1), all_outputs(o2));
}

TEST(Pipeline, BadClusterIsSkipped) {
  auto root = scratch_dir("badcorpus");
  write_file(root / "corpus" / "a_good" / "d1.txt", "Rain fell on the valley. Rivers rose fast. Farmers moved cattle uphill.");
  write_file(root / "corpus" / "b_bad" / "d1.txt", "The of and.");
  fs::create_directories(root / "corpus" / "c_empty");
  auto c = mini_config(root / "out", Model::single_mr);
  c.corpus = (root / "corpus").string();
  std::ostringstream log;
  EXPECT_EQ(run_summarize(c, log), kExitRuntime);
  EXPECT_TRUE(fs::exists(root / "out" / "a_good.summary.txt"));
  EXPECT_FALSE(fs::exists(root / "out" / "b_bad.summary.txt"));
  EXPECT_NE(log.str().find("b_bad"), std::string::npos);
  EXPECT_NE(log.str().find("c_empty"), std::string::npos);
}

TEST(Pipeline, DiagnosticsRecords) {
  auto o = scratch_dir("diag");
  auto c = mini_config(o, Model::jltmmr);
  c.diagnostics = true;
  std::ostringstream log;
  ASSERT_EQ(run_summarize(c, log), kExitOk);
  const auto text = slurp(o / "diagnostics.tsv");
  EXPECT_NE(text.find("\t1\tobjective\t"), std::string::npos);
  EXPECT_NE(text.find("\t1\tkb_total\t"), std::string::npos);
  EXPECT_NE(text.find("\t1\tf\t"), std::string::npos);
}

TEST(Evaluate, ReportRows) {
  auto o = scratch_dir("evalrun");
  std::ostringstream log;
  ASSERT_EQ(run_summarize(mini_config(o, Model::single_mr), log), kExitOk);
  auto rep = evaluate_corpus(fs::path(MDSUM_DATA_DIR) / "minicorpus", o, {}, nullptr, log);
  EXPECT_EQ(rep.failures, 0);
  ASSERT_EQ(rep.rows.size(), 5u * 4u + 4u);
  EXPECT_EQ(std::get<0>(rep.rows.back()), "MEAN");
  for (const auto& [c, m, v] : rep.rows) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(KbStats, Listing) {
  KnowledgeBase kb;
  kb.add_pair("a", "b", 3);
  kb.add_pair("a", "c", 5);
  kb.mark_task();
  const auto s = kb_stats(kb);
  EXPECT_NE(s.find("tasks\t1\n"), std::string::npos);
  EXPECT_NE(s.find("pairs\t2\n"), std::string::npos);
  EXPECT_LT(s.find("top\ta\tc\t5"), s.find("top\ta\tb\t3"));
}

TEST(Cli, EndToEnd) {
  auto o = scratch_dir("cli");
  const std::string data = MDSUM_DATA_DIR;
  const std::string common = " --corpus " + data + "/minicorpus --stopwords " + data +
                             "/stopwords_en.txt --output " + o.string() + "/run --kb " + o.string() + "/kb.tsv";
  EXPECT_EQ(run_cli("summarize" + common, o / "log1"), 0) << slurp(o / "log1");
  EXPECT_TRUE(fs::exists(o / "run" / "c01_river_flood.summary.txt"));
  EXPECT_EQ(run_cli("evaluate" + common, o / "log2"), 0) << slurp(o / "log2");
  EXPECT_NE(slurp(o / "log2").find("MEAN\tROUGE-1\t"), std::string::npos);
  EXPECT_EQ(run_cli("inspect-topics --factors " + (o / "run" / "c01_river_flood.factors").string(), o / "log3"), 0);
  EXPECT_NE(slurp(o / "log3").find("topic\t0\tcoherence\t"), std::string::npos);
  EXPECT_EQ(run_cli("kb stats --kb " + (o / "kb.tsv").string(), o / "log4"), 0);
  EXPECT_NE(slurp(o / "log4").find("tasks\t"), std::string::npos);

  // config file plus flag override
  write_file(o / "run.cfg", "model = single_mr\nlength_budget = 40\n" + std::string("corpus = ") + data +
                                "/minicorpus\nstopwords = " + data + "/stopwords_en.txt\noutput = " + (o / "cfgrun").string() + "\n");
  EXPECT_EQ(run_cli("summarize --config " + (o / "run.cfg").string() + " --length_budget 60", o / "log5"), 0)
      << slurp(o / "log5");
  const auto eff = parse_config(slurp(o / "cfgrun" / "effective.cfg"));
  EXPECT_EQ(eff.model, Model::single_mr);
  EXPECT_EQ(eff.length_budget, 60);
  EXPECT_LE(raw_word_count(slurp(o / "cfgrun" / "c02_library_opening.summary.txt")), 60u);
}

TEST(Cli, ExitCodes) {
  auto o = scratch_dir("cli_err");
  const std::string data = MDSUM_DATA_DIR;
  EXPECT_EQ(run_cli("summarize --corpus " + data + "/minicorpus --stopwords " + data + "/nope.txt --output " +
                        o.string() + " --kb " + o.string() + "/kb.tsv",
                    o / "l1"),
            1);
  EXPECT_NE(slurp(o / "l1").find("stopword"), std::string::npos);
  EXPECT_EQ(run_cli("summarize --alpha_v 0.9 --corpus " + data + "/minicorpus", o / "l2"), 1);
  EXPECT_EQ(run_cli("summarize --no-such-flag 1", o / "l3"), 1);
  EXPECT_EQ(run_cli("summarize --config " + (o / "missing.cfg").string(), o / "l4"), 1);
  EXPECT_EQ(run_cli("inspect-topics --factors " + (o / "none.factors").string(), o / "l5"), 2);
  EXPECT_EQ(run_cli("inspect-topics --factors ''", o / "l6"), 2);
  write_file(o / "kb.tsv", "not a kb\n");
  EXPECT_EQ(run_cli("kb stats --kb " + (o / "kb.tsv").string(), o / "l7"), 2);
}

// Copyright 2026 The genebench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: corpus building, splitting, inference, grading,
// metrics, post-processing, embedding evaluation and report tables.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "genebench/catalog.hpp"
#include "genebench/corpus.hpp"
#include "genebench/embed_eval.hpp"
#include "genebench/error.hpp"
#include "genebench/harness.hpp"
#include "genebench/postprocess.hpp"
#include "genebench/text.hpp"
#include "genebench/text_metrics.hpp"

namespace gb = genebench;
namespace fs = std::filesystem;

namespace {

constexpr const char* kEutilsKeyEnv = "GENEBENCH_EUTILS_API_KEY";

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) gb::fail(gb::ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

std::string read_all(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Config file plus --set overrides, shared by every command that takes one.
struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--config", file, "Run config (flat key=value file)");
    if (required) opt->required();
    cmd->add_option("--set", sets, "Override a config entry, key=value (repeatable)");
  }
  gb::harness::Config resolve() const {
    gb::harness::Config c = file.empty() ? gb::harness::Config{} : gb::harness::Config::load(file);
    for (const auto& s : sets) c.set(s);
    return c;
  }
};

std::optional<gb::ProviderSpec> provider_from(const gb::harness::Config& c) {
  if (!c.has("provider.endpoint")) return std::nullopt;
  gb::ProviderSpec p;
  p.endpoint = c.get("provider.endpoint");
  p.model_name = c.get("provider.model", c.get("model"));
  p.request_timeout = c.get_double("provider.timeout", p.request_timeout);
  p.rate_limit = c.get_double("provider.rate_limit", p.rate_limit);
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

struct CatalogArgs {
  std::string fixture;
  std::string eutils_url;
  std::string cache = "cache";
  double rate_limit = 3.0;

  void attach(CLI::App* cmd) {
    auto* f = cmd->add_option("--catalog", fixture, "Gene catalog fixture (JSON)");
    auto* e = cmd->add_option("--eutils-url", eutils_url, "E-utilities base URL for live lookups");
    f->excludes(e);
    cmd->add_option("--cache", cache, "Gene record cache directory")->capture_default_str();
    cmd->add_option("--catalog-rate", rate_limit, "Catalog requests per second")->capture_default_str();
  }
  std::unique_ptr<gb::corpus::CatalogSource> make() const {
    if (!fixture.empty()) {
      return std::make_unique<gb::corpus::FixtureSource>(gb::corpus::FixtureSource::load(fixture));
    }
    if (!eutils_url.empty()) {
      gb::corpus::EutilsOptions o;
      o.base_url = eutils_url;
      o.rate_limit = rate_limit;
      if (const char* key = std::getenv(kEutilsKeyEnv)) o.api_key = key;
      return std::make_unique<gb::corpus::EutilsSource>(o);
    }
    gb::fail(gb::ErrorKind::kConfigInvalid, "one of --catalog or --eutils-url is required");
  }
};

int cmd_build_corpus(const CatalogArgs& cat, const ConfigArgs& cfg, const std::string& symbols_file,
                     const std::string& templates_dir, const std::string& out_dir,
                     std::uint64_t seed, unsigned threads, bool rephrase, bool synthetic) {
  auto source = cat.make();
  gb::corpus::CatalogClient client(*source, cat.cache);
  std::vector<std::string> symbols;
  if (!symbols_file.empty()) {
    std::ifstream in(symbols_file);
    if (!in) gb::fail(gb::ErrorKind::kConfigInvalid, "cannot read symbols file " + symbols_file);
    std::string line;
    while (std::getline(in, line)) {
      const auto t = gb::text::trim(line);
      if (!t.empty() && t.front() != '#') symbols.emplace_back(t);
    }
  } else if (auto* fx = dynamic_cast<gb::corpus::FixtureSource*>(source.get())) {
    for (const auto& [sym, raw] : fx->raw()) symbols.push_back(sym);
  } else {
    gb::fail(gb::ErrorKind::kConfigInvalid, "--symbols is required with --eutils-url");
  }
  const auto templates = templates_dir.empty() ? gb::corpus::Templates{}
                                               : gb::corpus::Templates::load(templates_dir);
  std::unique_ptr<gb::HttpProvider> provider;
  if (rephrase || synthetic) {
    const auto spec = provider_from(cfg.resolve());
    if (!spec) gb::fail(gb::ErrorKind::kConfigInvalid, "--rephrase/--synthetic need provider.endpoint");
    provider = std::make_unique<gb::HttpProvider>(*spec);
  }
  auto result = gb::corpus::build_corpus(symbols, client, templates, rephrase ? provider.get() : nullptr,
                                         synthetic ? provider.get() : nullptr, seed, threads);
  result.manifest.write(out_dir, "corpus");
  auto skipped = open_out(fs::path(out_dir) / "skipped.tsv");
  skipped << "symbol\treason\n";
  for (const auto& [sym, why] : result.skipped) skipped << sym << '\t' << why << '\n';
  std::cout << "wrote " << result.manifest.samples.size() << " samples to " << out_dir
            << " (" << result.skipped.size() << " skipped)\n";
  return 0;
}

int cmd_split(const std::string& corpus_dir, std::size_t n, std::uint64_t seed,
              const std::string& out_dir, const CatalogArgs& cat) {
  const auto manifest = gb::corpus::CorpusManifest::load(corpus_dir, "corpus");
  const auto [train, eval] = gb::corpus::split_eval(manifest, n, seed);
  train.write(out_dir, "train");
  eval.write(out_dir, "eval");
  if (!cat.fixture.empty() || !cat.eutils_url.empty()) {
    auto source = cat.make();
    gb::corpus::CatalogClient client(*source, cat.cache);
    std::vector<gb::harness::EvalRow> rows;
    std::set<std::string> done;
    for (const auto& s : eval.samples) {
      if (s.task != gb::Task::kGeneDescription) continue;
      if (!done.insert(s.gene).second) continue;
      gb::harness::EvalRow row;
      row.sample.id = s.gene;
      row.sample.task = s.task;
      row.sample.prompt = s.input.empty() ? s.instruction : s.instruction + "\n\n" + s.input;
      row.sample.gold = client.fetch(s.gene);
      rows.push_back(std::move(row));
    }
    auto out = open_out(fs::path(out_dir) / "eval_set.jsonl");
    gb::harness::write_eval_set(out, rows);
  }
  std::cout << "train " << train.samples.size() << " samples, eval " << eval.samples.size()
            << " samples (" << n << " genes)\n";
  return 0;
}

int cmd_metrics(const std::string& pairs_file, const std::string& candidate,
                const std::string& reference, int max_n, int k) {
  std::vector<std::pair<std::string, std::string>> pairs;
  if (!pairs_file.empty()) {
    std::ifstream in(pairs_file);
    if (!in) gb::fail(gb::ErrorKind::kIo, "cannot open " + pairs_file);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) gb::fail(gb::ErrorKind::kParse, "pairs file: expected candidate<TAB>reference");
      pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
  } else {
    pairs.emplace_back(candidate, reference);
  }
  std::cout << "# tokenizer=" << gb::metrics::kTokenizerVersion << "\n";
  std::cout << "pair\tbleu\trouge" << k << "\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto c = gb::metrics::tokenize(pairs[i].first);
    const auto r = gb::metrics::tokenize(pairs[i].second);
    std::cout << i + 1 << '\t' << gb::harness::format_number(gb::metrics::bleu(c, r, max_n).value) << '\t'
              << gb::harness::format_number(gb::metrics::rouge_k_recall(c, r, k).value) << '\n';
  }
  return 0;
}

void write_changes(std::ostream& out, std::string_view id, const gb::postprocess::ChangeLog& log) {
  for (const auto& c : log) {
    out << id << '\t' << c.kind << '\t' << c.start << '\t' << c.end << '\t' << c.before << '\t'
        << c.after << '\n';
  }
}

int cmd_postprocess(const std::string& db_path, const std::string& gene, const std::string& input,
                    const std::string& eval_path, const std::string& outputs_path,
                    const std::string& out_path, const std::string& changes_path, bool no_append) {
  const auto db = gb::postprocess::GeneIdDatabase::load(db_path);
  gb::postprocess::IdOptions opts;
  opts.append_when_missing = !no_append;
  std::unique_ptr<std::ofstream> changes;
  if (!changes_path.empty()) {
    changes = std::make_unique<std::ofstream>(open_out(changes_path));
    *changes << "id\tkind\tstart\tend\tbefore\tafter\n";
  }
  auto repair = [&](std::string_view id, std::string_view text, std::string_view g) {
    gb::postprocess::ChangeLog log;
    auto fixed = gb::postprocess::correct_numeric_ids(text, g, db, opts, &log);
    fixed = gb::postprocess::normalize_aliases(fixed, g, db, &log);
    if (changes) write_changes(*changes, id, log);
    return fixed;
  };

  if (!gene.empty()) {
    std::string text;
    if (input.empty() || input == "-") {
      text = read_all(std::cin);
    } else {
      std::ifstream in(input, std::ios::binary);
      if (!in) gb::fail(gb::ErrorKind::kIo, "cannot open " + input);
      text = read_all(in);
    }
    const std::string fixed = repair(gene, text, gene);
    if (out_path.empty()) {
      std::cout << fixed;
    } else {
      open_out(out_path) << fixed;
    }
    return 0;
  }
  if (eval_path.empty() || outputs_path.empty() || out_path.empty()) {
    gb::fail(gb::ErrorKind::kConfigInvalid, "postprocess needs --gene, or --eval, --outputs and --out");
  }
  const auto rows = gb::harness::read_eval_set(eval_path);
  std::map<std::string, std::string> gene_of;
  for (const auto& r : rows) gene_of[r.sample.id] = gb::harness::gold_gene(r.sample);
  auto outputs = gb::harness::read_outputs(outputs_path);
  for (auto& o : outputs) {
    const auto it = gene_of.find(o.id);
    if (it == gene_of.end()) gb::fail(gb::ErrorKind::kMisaligned, "output id not in eval set: " + o.id);
    if (!db.find(it->second)) {
      spdlog::warn("{}: {} is not in the ID database; left unchanged", o.id, it->second);
      continue;
    }
    o.output = repair(o.id, o.output, it->second);
  }
  auto out = open_out(out_path);
  gb::harness::write_outputs(out, outputs);
  return 0;
}

struct EmbedArgs {
  std::string embeddings;
  bool binary = false;
  std::string labels;
  std::string gene_sets;
  std::size_t k = 15;
  std::string metric = "cosine";
  double resolution = 1.0;
  std::uint64_t seed = 0;
  int max_iters = 10;
  int restarts = 10;
  std::size_t top_n = 10;
  unsigned threads = 0;
  std::string out;
};

int cmd_embed_eval(const EmbedArgs& a) {
  namespace em = gb::embed;
  const auto emb = em::EmbeddingMatrix::load(a.embeddings, a.binary);
  const auto metric = a.metric == "euclidean" ? em::Metric::kEuclidean : em::Metric::kCosine;
  const auto graph = em::knn_graph(emb, a.k, metric, a.threads);
  em::LeidenOptions lo;
  lo.resolution = a.resolution;
  lo.seed = a.seed;
  lo.max_iters = a.max_iters;
  lo.restarts = a.restarts;
  const auto result = em::leiden(graph, lo);
  const auto& part = result.partition;
  const auto& ids = emb.row_ids();
  const fs::path out_dir(a.out);

  std::ostringstream header;
  header << "# k=" << a.k << "\n# metric=" << a.metric << "\n# resolution="
         << gb::harness::format_number(a.resolution) << "\n# seed=" << a.seed
         << "\n# max_iters=" << a.max_iters << "\n# restarts=" << a.restarts << "\n";
  {
    auto out = open_out(out_dir / "partition.tsv");
    out << header.str() << "symbol\tcommunity\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << '\t' << part[i] << '\n';
  }
  auto members = part.members();
  std::vector<std::size_t> order(members.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return members[x].size() > members[y].size(); });
  {
    auto out = open_out(out_dir / "clusters.tsv");
    out << header.str() << "community\tsize\n";
    for (std::size_t c : order) out << c << '\t' << members[c].size() << '\n';
  }
  {
    auto out = open_out(out_dir / "nmi.tsv");
    out << header.str() << "genes\tnmi\tmodularity\n";
    const double q = em::modularity(graph, part, a.resolution);
    if (a.labels.empty()) {
      out << ids.size() << "\t-\t" << gb::harness::format_number(q) << '\n';
    } else {
      std::map<std::string, std::string> label_of;
      for (auto& [sym, label] : em::read_labels(a.labels)) label_of[sym] = label;
      std::vector<std::size_t> clusters;
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = label_of.find(ids[i]);
        if (it == label_of.end()) continue;
        clusters.push_back(part[i]);
        labels.push_back(it->second);
      }
      if (clusters.empty()) gb::fail(gb::ErrorKind::kParse, "no embedded gene has a label");
      const auto encoded = em::encode_labels(labels);
      out << clusters.size() << '\t' << gb::harness::format_number(em::nmi(clusters, encoded)) << '\t'
          << gb::harness::format_number(q) << '\n';
    }
  }
  if (!a.gene_sets.empty()) {
    const auto sets = em::GeneSetCollection::load(a.gene_sets);
    auto enr = open_out(out_dir / "enrichment.tsv");
    auto top = open_out(out_dir / "top_pathways.tsv");
    enr << header.str() << "community\tpathway\toverlap\tp_value\tadjusted_p\n";
    top << header.str() << "community\trank\tpathway\toverlap\tadjusted_p\tneg_log10_adjusted_p\n";
    for (std::size_t c : order) {
      std::set<std::string> genes;
      for (std::size_t i : members[c]) genes.insert(ids[i]);
      const auto results = em::enrich_cluster(genes, sets);
      for (const auto& r : results) {
        enr << c << '\t' << r.pathway << '\t' << r.overlap << '\t' << gb::harness::format_number(r.p_value)
            << '\t' << gb::harness::format_number(r.adjusted_p) << '\n';
      }
      const auto best = em::top_pathways(results, a.top_n);
      for (std::size_t rank = 0; rank < best.size(); ++rank) {
        const auto& r = best[rank];
        top << c << '\t' << rank + 1 << '\t' << r.pathway << '\t' << r.overlap << '\t'
            << gb::harness::format_number(r.adjusted_p) << '\t'
            << gb::harness::format_number(r.adjusted_p > 0 ? -std::log10(r.adjusted_p) : 0.0) << '\n';
      }
    }
  }
  std::cout << part.community_count() << " communities over " << ids.size() << " genes\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& tables, const std::string& out_path) {
  std::vector<gb::harness::BenchmarkRow> rows;
  for (const auto& t : tables) {
    auto more = gb::harness::load_table(t);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  if (out_path.empty()) {
    gb::harness::emit_report(rows, std::cout);
  } else {
    auto out = open_out(out_path);
    gb::harness::emit_report(rows, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"genebench: gene description corpora, grading and analysis"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  // build-corpus
  auto* build = app.add_subcommand("build-corpus", "Fetch genes and write an instruction corpus");
  CatalogArgs build_cat;
  build_cat.attach(build);
  ConfigArgs build_cfg;
  build_cfg.attach(build, false);
  std::string symbols_file, templates_dir, build_out;
  std::uint64_t build_seed = 0;
  unsigned build_threads = 1;
  bool rephrase = false, synthetic = false;
  build->add_option("--symbols", symbols_file, "Gene symbols, one per line (default: whole fixture)");
  build->add_option("--templates", templates_dir, "Directory with instruction/rephrase/generation.txt");
  build->add_option("--out", build_out, "Output directory")->required();
  build->add_option("--seed", build_seed, "Seed recorded in the manifest")->capture_default_str();
  build->add_option("--threads", build_threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 256u));
  build->add_flag("--rephrase", rephrase, "Rephrase real summaries with the configured provider");
  build->add_flag("--synthetic", synthetic, "Generate synthetic samples for protein-coding genes");

  // split
  auto* split = app.add_subcommand("split", "Hold out whole genes for evaluation");
  std::string split_corpus, split_out;
  std::size_t split_n = 20;
  std::uint64_t split_seed = 0;
  CatalogArgs split_cat;
  split->add_option("--corpus", split_corpus, "Directory holding corpus.jsonl and its manifest")->required();
  split->add_option("--n", split_n, "Number of eval genes")->capture_default_str();
  split->add_option("--seed", split_seed, "Shuffle seed")->capture_default_str();
  split->add_option("--out", split_out, "Output directory")->required();
  split_cat.attach(split);

  // infer / grade
  auto* infer = app.add_subcommand("infer", "Run the configured provider over an eval set");
  ConfigArgs infer_cfg;
  infer_cfg.attach(infer, true);
  auto* grade = app.add_subcommand("grade", "Grade outputs and write the report row");
  ConfigArgs grade_cfg;
  grade_cfg.attach(grade, true);
  bool rubric = false;
  std::string grade_outputs;
  grade->add_option("--outputs", grade_outputs, "Outputs file (overrides the config)");
  grade->add_flag("--rubric", rubric, "Also write a worksheet for grading by hand");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "BLEU and ROUGE-k for text pairs");
  std::string pairs_file, candidate, reference;
  int max_n = 4, rouge_k = 1;
  auto* pf = metrics->add_option("--pairs", pairs_file, "TSV of candidate<TAB>reference lines");
  auto* cand = metrics->add_option("--candidate", candidate, "Candidate text");
  metrics->add_option("--reference", reference, "Reference text");
  pf->excludes(cand);
  metrics->add_option("--max-n", max_n, "Highest BLEU order")->capture_default_str()->check(CLI::Range(1, 8));
  metrics->add_option("--k", rouge_k, "ROUGE order")->capture_default_str()->check(CLI::Range(1, 8));

  // postprocess
  auto* post = app.add_subcommand("postprocess", "Repair gene IDs and alias clauses in outputs");
  std::string db_path, post_gene, post_input, post_eval, post_outputs, post_out, post_changes;
  bool no_append = false;
  post->add_option("--db", db_path, "Gene ID database (TSV)")->required();
  post->add_option("--gene", post_gene, "Repair a single text about this gene");
  post->add_option("--input", post_input, "Text file for --gene ('-' or absent: stdin)");
  post->add_option("--eval", post_eval, "Eval set naming each row's gene");
  post->add_option("--outputs", post_outputs, "Outputs file to repair");
  post->add_option("--out", post_out, "Where to write the result");
  post->add_option("--changes", post_changes, "Write a TSV log of every edit");
  post->add_flag("--no-append", no_append, "Do not append IDs to outputs that name none");

  // embed-eval
  auto* embed = app.add_subcommand("embed-eval", "Cluster gene embeddings and score the clusters");
  EmbedArgs ea;
  embed->add_option("--embeddings", ea.embeddings, "Embedding matrix file")->required();
  embed->add_flag("--binary", ea.binary, "The matrix file uses the binary layout");
  embed->add_option("--labels", ea.labels, "symbol<TAB>label file for NMI");
  embed->add_option("--gene-sets", ea.gene_sets, "Pathway file for enrichment");
  embed->add_option("--k", ea.k, "Neighbours per gene")->capture_default_str();
  embed->add_option("--metric", ea.metric, "cosine or euclidean")
      ->capture_default_str()
      ->check(CLI::IsMember({"cosine", "euclidean"}));
  embed->add_option("--resolution", ea.resolution, "Modularity resolution")->capture_default_str();
  embed->add_option("--seed", ea.seed, "Leiden seed")->capture_default_str();
  embed->add_option("--max-iters", ea.max_iters, "Leiden passes")->capture_default_str()->check(CLI::Range(1, 1000));
  embed->add_option("--restarts", ea.restarts, "Independent Leiden runs; the best is kept")
      ->capture_default_str()
      ->check(CLI::Range(1, 1000));
  embed->add_option("--top-n", ea.top_n, "Pathways listed per cluster")->capture_default_str();
  embed->add_option("--threads", ea.threads, "Threads for the k-NN graph (0: all cores)")->capture_default_str();
  embed->add_option("--out", ea.out, "Output directory")->required();

  // report
  auto* report = app.add_subcommand("report", "Merge benchmark tables and add correlations");
  std::vector<std::string> tables;
  std::string report_out;
  report->add_option("--table", tables, "Benchmark table (repeatable)")->required();
  report->add_option("--out", report_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto logger = spdlog::stderr_color_mt("genebench");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*build) {
      return cmd_build_corpus(build_cat, build_cfg, symbols_file, templates_dir, build_out, build_seed,
                              build_threads, rephrase, synthetic);
    }
    if (*split) return cmd_split(split_corpus, split_n, split_seed, split_out, split_cat);
    if (*infer) {
      const auto rc = gb::harness::RunConfig::from(infer_cfg.resolve());
      std::cout << "wrote " << gb::harness::run_inference(rc).string() << "\n";
      return 0;
    }
    if (*grade) {
      auto c = grade_cfg.resolve();
      if (!grade_outputs.empty()) c.set("outputs", grade_outputs);
      const auto rc = gb::harness::RunConfig::from(c, true);
      const auto result = gb::harness::grade_run(rc, rubric);
      std::cout << rc.model << "\tfactual " << gb::harness::format_number(result.row.factual)
                << "\tstructural " << gb::harness::format_number(result.row.structural) << "\taverage "
                << gb::harness::format_number(result.row.average) << "\n";
      return 0;
    }
    if (*metrics) return cmd_metrics(pairs_file, candidate, reference, max_n, rouge_k);
    if (*post) {
      return cmd_postprocess(db_path, post_gene, post_input, post_eval, post_outputs, post_out,
                             post_changes, no_append);
    }
    if (*embed) return cmd_embed_eval(ea);
    if (*report) return cmd_report(tables, report_out);
  } catch (const gb::Error& e) {
    spdlog::error("{}: {}", gb::to_string(e.kind()), e.what());
    return gb::exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}

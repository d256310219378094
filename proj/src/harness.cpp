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

#include "genebench/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "genebench/catalog.hpp"
#include "genebench/error.hpp"
#include "genebench/parallel.hpp"
#include "genebench/stopwords.hpp"
#include "genebench/text.hpp"

namespace genebench::harness {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

[[noreturn]] void bad_config(std::string_view key, std::string_view why) {
  fail(ErrorKind::kConfigInvalid, "config " + std::string(key) + ": " + std::string(why));
}

bool by_id(std::string_view a, std::string_view b) { return text::id_less(a, b); }

std::string tsv_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\t') {
      out += "\\t";
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

Config Config::parse(std::string_view text) {
  Config c;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(text, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.find('=') == std::string_view::npos) {
      fail(ErrorKind::kConfigInvalid, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    c.set(line);
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kConfigInvalid, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    fail(ErrorKind::kConfigInvalid, "expected key=value, got '" + std::string(assignment) + "'");
  }
  const auto key = text::trim(assignment.substr(0, eq));
  if (key.empty()) fail(ErrorKind::kConfigInvalid, "empty config key");
  values_[std::string(key)] = std::string(text::trim(assignment.substr(eq + 1)));
}

std::string Config::get(std::string_view key, std::string_view fallback) const {
  const auto it = values_.find(std::string(key));
  return it == values_.end() ? std::string(fallback) : it->second;
}

double Config::get_double(std::string_view key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_config(key, "not a number: '" + v + "'");
  }
  return out;
}

std::int64_t Config::get_int(std::string_view key, std::int64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_config(key, "not an integer: '" + v + "'");
  return out;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text::ascii_lower(get(key));
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  bad_config(key, "not a boolean: '" + v + "'");
}

std::string Config::provenance() const {
  std::string out;
  for (const auto& [k, v] : values_) out += "# " + k + "=" + v + "\n";
  return out;
}

RunConfig RunConfig::from(const Config& config, bool require_outputs) {
  RunConfig rc;
  rc.source = config;
  try {
    rc.task = parse_task(config.get("task", "gene_description"));
  } catch (const Error& e) {
    bad_config("task", e.what());
  }
  auto existing = [&](const char* key) {
    if (!config.has(key) || config.get(key).empty()) bad_config(key, "missing");
    std::filesystem::path p = config.get(key);
    if (!std::filesystem::exists(p)) bad_config(key, "no such file: " + p.string());
    return p;
  };
  rc.corpus = existing("corpus");
  rc.prompt_spec = existing("prompt_spec");
  if (!config.has("output_dir") || config.get("output_dir").empty()) bad_config("output_dir", "missing");
  rc.output_dir = config.get("output_dir");
  if (config.has("outputs") && !config.get("outputs").empty()) rc.outputs = config.get("outputs");
  if (require_outputs && !std::filesystem::exists(rc.outputs_path())) {
    bad_config("outputs", "no such file: " + rc.outputs_path().string());
  }

  const auto seed = config.get_int("seed", 0);
  if (seed < 0) bad_config("seed", "must be non-negative");
  rc.seed = static_cast<std::uint64_t>(seed);
  const auto par = config.get_int("parallelism", 1);
  if (par < 1 || par > 1024) bad_config("parallelism", "must be in [1, 1024]");
  rc.parallelism = static_cast<unsigned>(par);
  rc.model = config.get("model", "model");
  if (rc.model.empty() || rc.model.find('\t') != std::string::npos) bad_config("model", "bad name");
  rc.finetuned = config.get_bool("finetuned", false);

  rc.grader.function_recall_threshold =
      config.get_double("grader.function_recall_threshold", rc.grader.function_recall_threshold);
  if (rc.grader.function_recall_threshold < 0.0 || rc.grader.function_recall_threshold > 1.0) {
    bad_config("grader.function_recall_threshold", "must be in [0, 1]");
  }
  const std::string scorer = config.get("grader.protein_scorer", "substring");
  if (scorer == "substring") {
    rc.grader.protein_scorer = grading::ProteinScorer::kSubstring;
  } else if (scorer == "subsequence") {
    rc.grader.protein_scorer = grading::ProteinScorer::kSubsequence;
  } else {
    bad_config("grader.protein_scorer", "expected substring or subsequence");
  }
  rc.bleu_max_n = static_cast<int>(config.get_int("bleu.max_n", 4));
  if (rc.bleu_max_n < 1 || rc.bleu_max_n > 8) bad_config("bleu.max_n", "must be in [1, 8]");
  rc.rouge_k = static_cast<int>(config.get_int("rouge.k", 1));
  if (rc.rouge_k < 1 || rc.rouge_k > 8) bad_config("rouge.k", "must be in [1, 8]");
  rc.retry_attempts = static_cast<int>(config.get_int("retry.attempts", 3));
  if (rc.retry_attempts < 1 || rc.retry_attempts > 10) bad_config("retry.attempts", "must be in [1, 10]");
  rc.retry_backoff = config.get_double("retry.backoff", 1.0);
  if (rc.retry_backoff < 0.0) bad_config("retry.backoff", "must be non-negative");

  if (config.has("provider.endpoint")) {
    ProviderSpec p;
    p.endpoint = config.get("provider.endpoint");
    p.model_name = config.get("provider.model", rc.model);
    p.request_timeout = config.get_double("provider.timeout", p.request_timeout);
    p.rate_limit = config.get_double("provider.rate_limit", p.rate_limit);
    p.validate();
    rc.provider = p;
  }
  return rc;
}

std::filesystem::path RunConfig::outputs_path() const {
  return outputs.empty() ? output_dir / "outputs.jsonl" : outputs;
}

// ---------------------------------------------------------------------------
// Eval and output files

std::string eval_row_to_json(const EvalRow& row) {
  const auto& s = row.sample;
  json j;
  j["id"] = s.id;
  j["task"] = std::string(to_string(s.task));
  j["prompt"] = s.prompt;
  if (row.image) j["image"] = *row.image;
  if (!s.output.empty()) j["output"] = s.output;
  if (const auto* r = std::get_if<GeneRecord>(&s.gold)) {
    j["gold"] = json::parse(corpus::record_to_json(*r));
  } else if (const auto* name = std::get_if<std::string>(&s.gold)) {
    j["gold"] = *name;
  } else {
    const auto& m = std::get<MarkerRelation>(s.gold);
    j["gold"] = json{{"gene", m.gene}, {"cell_type", m.cell_type}, {"is_marker", m.is_marker}};
  }
  return j.dump();
}

EvalRow eval_row_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    EvalRow row;
    auto& s = row.sample;
    s.id = j.at("id").get<std::string>();
    if (s.id.empty()) fail(ErrorKind::kParse, "eval row with empty id");
    s.task = parse_task(j.at("task").get<std::string>());
    s.prompt = j.at("prompt").get<std::string>();
    s.output = j.value("output", std::string());
    if (j.contains("image") && !j.at("image").is_null()) row.image = j.at("image").get<std::string>();
    const json& g = j.at("gold");
    switch (s.task) {
      case Task::kGeneDescription:
        try {
          s.gold = corpus::record_from_json(g.dump());
        } catch (const Error& e) {
          fail(ErrorKind::kParse, std::string("eval row ") + s.id + ": " + e.what());
        }
        break;
      case Task::kProteinClassification:
        s.gold = g.get<std::string>();
        break;
      case Task::kMarkerGene: {
        MarkerRelation m;
        m.gene = g.at("gene").get<std::string>();
        m.cell_type = g.at("cell_type").get<std::string>();
        m.is_marker = g.at("is_marker").get<bool>();
        s.gold = m;
        break;
      }
    }
    s.validate();
    return row;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("eval row: ") + e.what());
  }
}

namespace {

template <class T, class Parse>
std::vector<T> read_lines(const std::filesystem::path& path, Parse parse) {
  std::istringstream in(read_file(path));
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(parse(line));
    } catch (const Error& e) {
      fail(e.kind(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<EvalRow> read_eval_set(const std::filesystem::path& path) {
  auto rows = read_lines<EvalRow>(path, eval_row_from_json);
  std::set<std::string> ids;
  for (const auto& r : rows) {
    if (!ids.insert(r.sample.id).second) fail(ErrorKind::kParse, "duplicate eval id " + r.sample.id);
  }
  return rows;
}

void write_eval_set(std::ostream& out, const std::vector<EvalRow>& rows) {
  for (const auto& r : rows) out << eval_row_to_json(r) << '\n';
}

std::string gold_gene(const grading::EvalSample& sample) {
  if (const auto* r = std::get_if<GeneRecord>(&sample.gold)) return r->symbol;
  if (const auto* m = std::get_if<MarkerRelation>(&sample.gold)) return m->gene;
  return std::get<std::string>(sample.gold);
}

std::string output_row_to_json(const OutputRow& row) {
  json j{{"id", row.id}, {"output", row.output}};
  j["error"] = row.error ? json(*row.error) : json(nullptr);
  return j.dump();
}

OutputRow output_row_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    OutputRow r;
    r.id = j.at("id").get<std::string>();
    r.output = j.value("output", std::string());
    if (j.contains("error") && !j.at("error").is_null()) r.error = j.at("error").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("output row: ") + e.what());
  }
}

std::vector<OutputRow> read_outputs(const std::filesystem::path& path) {
  return read_lines<OutputRow>(path, output_row_from_json);
}

void write_outputs(std::ostream& out, const std::vector<OutputRow>& rows) {
  for (const auto& r : rows) out << output_row_to_json(r) << '\n';
}

// ---------------------------------------------------------------------------
// Inference

std::vector<OutputRow> run_inference(const std::vector<EvalRow>& rows, TextProvider& provider,
                                     const InferenceOptions& options) {
  if (options.attempts < 1) fail(ErrorKind::kConfigInvalid, "retry attempts must be >= 1");
  Clock& clock = options.clock ? *options.clock : system_clock();
  std::vector<OutputRow> out(rows.size());
  parallel_for(rows.size(), options.parallelism, [&](std::size_t i) {
    const auto& s = rows[i].sample;
    OutputRow& r = out[i];
    r.id = s.id;
    bool all_unreachable = true;
    std::string last_error;
    for (int attempt = 1; attempt <= options.attempts; ++attempt) {
      try {
        r.output = provider.complete(s.prompt);
        r.error.reset();
        return;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kProviderError && e.kind() != ErrorKind::kProviderUnreachable) {
          throw;
        }
        all_unreachable = all_unreachable && e.kind() == ErrorKind::kProviderUnreachable;
        last_error = e.what();
        spdlog::warn("{}: attempt {}/{} failed: {}", s.id, attempt, options.attempts, last_error);
      }
      if (attempt < options.attempts) clock.sleep_for(options.backoff * std::ldexp(1.0, attempt - 1));
    }
    if (all_unreachable) {
      fail(ErrorKind::kProviderUnreachable,
           "provider unreachable after " + std::to_string(options.attempts) + " attempts: " + last_error);
    }
    r.output.clear();
    r.error = last_error;
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const OutputRow& a, const OutputRow& b) { return by_id(a.id, b.id); });
  return out;
}

std::filesystem::path run_inference(const RunConfig& config) {
  if (!config.provider) fail(ErrorKind::kConfigInvalid, "config provider.endpoint: missing");
  HttpProvider provider(*config.provider);
  const auto rows = read_eval_set(config.corpus);
  InferenceOptions opts;
  opts.parallelism = config.parallelism;
  opts.attempts = config.retry_attempts;
  opts.backoff = config.retry_backoff;
  const auto outputs = run_inference(rows, provider, opts);
  const auto path = config.outputs_path();
  auto out = open_out(path);
  write_outputs(out, outputs);
  return path;
}

// ---------------------------------------------------------------------------
// Grading

BenchmarkRow BenchmarkRow::make(std::string model, double factual, double structural,
                                std::optional<double> bleu, std::optional<double> rouge1,
                                bool finetuned) {
  BenchmarkRow r;
  r.model = std::move(model);
  r.factual = factual;
  r.structural = structural;
  r.average = (factual + structural) / 2.0;
  r.bleu = bleu;
  r.rouge1 = rouge1;
  r.finetuned = finetuned;
  return r;
}

GradingResult run_grading(const std::vector<EvalRow>& rows, const std::vector<OutputRow>& outputs,
                          const grading::PromptSpec& spec, const GradingOptions& options) {
  std::unordered_map<std::string, const OutputRow*> by_output;
  for (const auto& o : outputs) {
    if (!by_output.emplace(o.id, &o).second) fail(ErrorKind::kMisaligned, "duplicate output id " + o.id);
  }
  if (outputs.size() != rows.size()) {
    fail(ErrorKind::kMisaligned, std::to_string(outputs.size()) + " outputs for " +
                                     std::to_string(rows.size()) + " eval samples");
  }
  for (const auto& r : rows) {
    if (!by_output.count(r.sample.id)) fail(ErrorKind::kMisaligned, "no output for eval id " + r.sample.id);
  }

  std::vector<SampleDetail> details(rows.size());
  parallel_for(rows.size(), options.parallelism, [&](std::size_t i) {
    grading::EvalSample s = rows[i].sample;
    const OutputRow& o = *by_output.at(s.id);
    s.output = o.output;
    SampleDetail& d = details[i];
    d.score = grading::grade_sample(s, spec, options.grader);
    d.error = o.error;
    if (s.task == Task::kGeneDescription) {
      const auto cand = metrics::tokenize(s.output);
      const auto ref = metrics::tokenize(std::get<GeneRecord>(s.gold).summary);
      d.bleu = metrics::bleu(cand, ref, options.bleu_max_n).value;
      d.rouge1 = metrics::rouge_k_recall(cand, ref, options.rouge_k).value;
    }
  });
  std::stable_sort(details.begin(), details.end(), [](const SampleDetail& a, const SampleDetail& b) {
    return by_id(a.score.id, b.score.id);
  });

  GradingResult result;
  std::vector<grading::SampleScore> scores;
  for (const auto& d : details) scores.push_back(d.score);
  result.report = grading::aggregate(std::move(scores));
  std::optional<double> bleu_mean;
  std::optional<double> rouge_mean;
  if (std::all_of(details.begin(), details.end(), [](const SampleDetail& d) { return d.bleu.has_value(); })) {
    double b = 0.0;
    double r = 0.0;
    for (const auto& d : details) {
      b += *d.bleu;
      r += *d.rouge1;
    }
    bleu_mean = b / static_cast<double>(details.size());
    rouge_mean = r / static_cast<double>(details.size());
  }
  result.row = BenchmarkRow::make(options.model, result.report.factual_mean,
                                  result.report.structural_mean, bleu_mean, rouge_mean,
                                  options.finetuned);
  result.details = std::move(details);
  return result;
}

// ---------------------------------------------------------------------------
// Reports

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : "-"; }

constexpr std::string_view kTableHeader = "model\tfactual\tstructural\taverage\tbleu\trouge1\tfinetuned";

void correlation_line(std::ostream& out, std::string_view name,
                      const std::vector<BenchmarkRow>& rows,
                      const std::optional<double> BenchmarkRow::*metric) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    if (!(r.*metric)) continue;
    xs.push_back(*(r.*metric));
    ys.push_back(r.average);
  }
  if (xs.size() < 2) {
    out << "# correlation omitted for " << name << ": fewer than 2 rows\n";
    return;
  }
  try {
    const auto c = metrics::pearson_test(xs, ys);
    out << name << "~average\t" << c.n << '\t' << format_number(c.coefficient) << '\t'
        << format_number(c.p_value) << '\n';
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kConstantColumn) throw;
    out << "# correlation undefined for " << name << ": constant column\n";
  }
}

}  // namespace

void emit_report(const std::vector<BenchmarkRow>& rows, std::ostream& out, std::string_view header) {
  out << header;
  if (!header.empty() && header.back() != '\n') out << '\n';
  out << kTableHeader << '\n';
  for (const auto& r : rows) {
    out << r.model << '\t' << format_number(r.factual) << '\t' << format_number(r.structural) << '\t'
        << format_number(r.average) << '\t' << opt_number(r.bleu) << '\t' << opt_number(r.rouge1)
        << '\t' << (r.finetuned ? "yes" : "no") << '\n';
  }
  out << "\ncorrelation\tn\tcoefficient\tp_value\n";
  correlation_line(out, "bleu", rows, &BenchmarkRow::bleu);
  correlation_line(out, "rouge1", rows, &BenchmarkRow::rouge1);
}

std::vector<BenchmarkRow> read_table(std::istream& in) {
  std::vector<BenchmarkRow> rows;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  auto number = [&](const std::string& cell, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
      fail(ErrorKind::kParse, "table line " + std::to_string(line_no) + ": bad " + what + " '" + cell + "'");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) {
      if (header_seen) break;
      continue;
    }
    if (line.front() == '#') continue;
    if (!header_seen) {
      if (line != kTableHeader) fail(ErrorKind::kParse, "table: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto cells = text::split(line, '\t');
    if (cells.size() != 7) fail(ErrorKind::kParse, "table line " + std::to_string(line_no) + ": expected 7 columns");
    const double f = number(cells[1], "factual");
    const double s = number(cells[2], "structural");
    const double avg = number(cells[3], "average");
    auto metric = [&](const std::string& cell, const char* what) -> std::optional<double> {
      if (cell == "-") return std::nullopt;
      return number(cell, what);
    };
    bool ft = false;
    if (cells[6] == "yes") {
      ft = true;
    } else if (cells[6] != "no") {
      fail(ErrorKind::kParse, "table line " + std::to_string(line_no) + ": finetuned must be yes or no");
    }
    auto row = BenchmarkRow::make(cells[0], f, s, metric(cells[4], "bleu"), metric(cells[5], "rouge1"), ft);
    if (std::abs(row.average - avg) > 1e-3) {
      fail(ErrorKind::kParse, "table line " + std::to_string(line_no) + ": average " + cells[3] +
                                  " is not (factual + structural) / 2");
    }
    for (double v : {f, s}) {
      if (v < 0.0 || v > 1.0) fail(ErrorKind::kParse, "table line " + std::to_string(line_no) + ": score outside [0, 1]");
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) fail(ErrorKind::kParse, "table: missing header");
  return rows;
}

std::vector<BenchmarkRow> load_table(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_table(in);
}

void write_details(std::ostream& out, const GradingResult& result) {
  out << "id\tfactual\tstructural\tunparseable\tbleu\trouge1\terror\n";
  for (const auto& d : result.details) {
    out << d.score.id << '\t' << format_number(d.score.factual) << '\t' << d.score.structural << '\t'
        << (d.score.unparseable ? "yes" : "no") << '\t' << opt_number(d.bleu) << '\t'
        << opt_number(d.rouge1) << '\t' << (d.error ? tsv_cell(*d.error) : "-") << '\n';
  }
}

namespace {

std::string describe_gold(const grading::Gold& gold) {
  if (const auto* r = std::get_if<GeneRecord>(&gold)) return r->symbol + ": " + r->summary;
  if (const auto* m = std::get_if<MarkerRelation>(&gold)) {
    return m->gene + " / " + m->cell_type + " / " + (m->is_marker ? "yes" : "no");
  }
  return std::get<std::string>(gold);
}

}  // namespace

void write_rubric(std::ostream& out, const std::vector<EvalRow>& rows,
                  const std::vector<OutputRow>& outputs, const GradingResult& result) {
  std::unordered_map<std::string, const EvalRow*> row_by_id;
  for (const auto& r : rows) row_by_id.emplace(r.sample.id, &r);
  std::unordered_map<std::string, const OutputRow*> out_by_id;
  for (const auto& o : outputs) out_by_id.emplace(o.id, &o);
  out << "id\ttask\tgold\toutput\tauto_factual\tauto_structural\thuman_factual\thuman_structural\tnotes\n";
  for (const auto& d : result.details) {
    const auto& row = *row_by_id.at(d.score.id);
    out << d.score.id << '\t' << to_string(row.sample.task) << '\t'
        << tsv_cell(describe_gold(row.sample.gold)) << '\t' << tsv_cell(out_by_id.at(d.score.id)->output)
        << '\t' << format_number(d.score.factual) << '\t' << d.score.structural << "\t\t\t\n";
  }
}

namespace {

std::string run_header(const RunConfig& config) {
  std::string h = config.source.provenance();
  h += "# tokenizer=" + std::string(metrics::kTokenizerVersion) + "\n";
  h += "# stopwords=" + std::string(kStopwordsVersion) + "\n";
  return h;
}

GradingResult grade_and_write(const RunConfig& config, const std::vector<EvalRow>& rows,
                              const std::vector<OutputRow>& outputs, bool rubric) {
  const auto spec = grading::PromptSpec::load(config.prompt_spec.string());
  GradingOptions opts;
  opts.grader = config.grader;
  opts.model = config.model;
  opts.finetuned = config.finetuned;
  opts.bleu_max_n = config.bleu_max_n;
  opts.rouge_k = config.rouge_k;
  opts.parallelism = config.parallelism;
  for (const auto& r : rows) {
    if (r.sample.task != config.task) {
      fail(ErrorKind::kParse, "eval row " + r.sample.id + " is " + std::string(to_string(r.sample.task)) +
                                  ", run is configured for " + std::string(to_string(config.task)));
    }
  }
  auto result = run_grading(rows, outputs, spec, opts);
  {
    auto out = open_out(config.output_dir / "report.tsv");
    emit_report({result.row}, out, run_header(config));
  }
  {
    auto out = open_out(config.output_dir / "details.tsv");
    write_details(out, result);
  }
  if (rubric) {
    auto out = open_out(config.output_dir / "rubric.tsv");
    write_rubric(out, rows, outputs, result);
  }
  return result;
}

}  // namespace

GradingResult grade_run(const RunConfig& config, bool rubric) {
  const auto rows = read_eval_set(config.corpus);
  const auto outputs = read_outputs(config.outputs_path());
  return grade_and_write(config, rows, outputs, rubric);
}

GradingResult full_run(const RunConfig& config, TextProvider& provider, Clock* clock) {
  const auto rows = read_eval_set(config.corpus);
  InferenceOptions opts;
  opts.parallelism = config.parallelism;
  opts.attempts = config.retry_attempts;
  opts.backoff = config.retry_backoff;
  opts.clock = clock;
  const auto outputs = run_inference(rows, provider, opts);
  {
    auto out = open_out(config.outputs_path());
    write_outputs(out, outputs);
  }
  return grade_and_write(config, rows, outputs, false);
}

}  // namespace genebench::harness

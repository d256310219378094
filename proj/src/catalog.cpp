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

#include "genebench/catalog.hpp"

#include <unistd.h>

#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>
#include <system_error>

#include <httplib.h>
#include <json.hpp>

#include "genebench/error.hpp"
#include "genebench/text.hpp"

namespace genebench::corpus {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json record_json(const GeneRecord& r) {
  return json{{"symbol", r.symbol},         {"full_name", r.full_name},
              {"aliases", r.aliases},       {"ensembl_id", r.ensembl_id},
              {"hgnc_id", r.hgnc_id},       {"biotype", std::string(to_string(r.biotype))},
              {"summary", r.summary}};
}

GeneRecord record_from(const json& j) {
  if (!j.is_object()) fail(ErrorKind::kMalformedResponse, "gene record is not an object");
  try {
    GeneRecord r;
    r.symbol = j.at("symbol").get<std::string>();
    r.full_name = j.value("full_name", std::string());
    r.aliases = j.value("aliases", std::vector<std::string>{});
    r.ensembl_id = j.value("ensembl_id", std::string());
    r.hgnc_id = j.value("hgnc_id", std::string());
    r.biotype = parse_biotype(j.at("biotype").get<std::string>());
    if (j.contains("summary") && !j.at("summary").is_null()) {
      r.summary = j.at("summary").get<std::string>();
    }
    r.normalize_aliases();
    r.validate();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kMalformedResponse, std::string("gene record: ") + e.what());
  } catch (const Error& e) {
    fail(ErrorKind::kMalformedResponse, std::string("gene record: ") + e.what());
  }
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kMalformedResponse, std::string(what) + ": " + e.what());
  }
}

// Keeps cache file names portable whatever the symbol contains.
std::string file_safe(std::string_view symbol) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : symbol) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  if (out == "." || out == "..") out = "%2E" + out.substr(1);
  return out;
}

std::string url_encode(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      static constexpr char kHex[] = "0123456789ABCDEF";
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

}  // namespace

std::string record_to_json(const GeneRecord& record) { return record_json(record).dump(); }

GeneRecord record_from_json(std::string_view json_text) {
  return record_from(parse_json(json_text, "gene record"));
}

FixtureSource::FixtureSource(std::string_view json_text) {
  const json doc = parse_json(json_text, "catalog fixture");
  try {
    version_ = doc.at("catalog_version").get<std::string>();
    for (const auto& g : doc.at("genes")) {
      raw_[g.at("symbol").get<std::string>()] = g.dump();
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kMalformedResponse, std::string("catalog fixture: ") + e.what());
  }
}

FixtureSource FixtureSource::load(const std::string& path) { return FixtureSource(read_file(path)); }

FixtureSource FixtureSource::from_records(std::string version,
                                          const std::vector<GeneRecord>& records) {
  FixtureSource s;
  s.version_ = std::move(version);
  for (const auto& r : records) s.raw_[r.symbol] = record_to_json(r);
  return s;
}

GeneRecord FixtureSource::lookup(std::string_view symbol) {
  const auto it = raw_.find(std::string(symbol));
  if (it == raw_.end()) fail(ErrorKind::kNotFound, "gene not in catalog: " + std::string(symbol));
  return record_from_json(it->second);
}

Biotype biotype_from_ncbi(std::string_view type_of_gene) {
  const std::string t = text::ascii_lower(text::trim(type_of_gene));
  if (t == "protein-coding" || t == "protein_coding") return Biotype::kProteinCoding;
  if (t == "pseudo" || t == "pseudogene") return Biotype::kPseudogene;
  if (t == "ncrna" || t == "rrna" || t == "trna" || t == "snrna" || t == "scrna" ||
      t == "snorna" || t == "mirna" || t == "lncrna" || t == "non_coding" || t == "non-coding" ||
      t == "misc_rna") {
    return Biotype::kNonCoding;
  }
  fail(ErrorKind::kMalformedResponse, "unrecognised type_of_gene: " + std::string(type_of_gene));
}

EutilsSource::EutilsSource(EutilsOptions options, Clock& clock)
    : options_(std::move(options)), limiter_(options_.rate_limit, clock) {}

std::string EutilsSource::get(const std::string& path_and_query) {
  // Split "scheme://host[:port]/prefix" so the prefix can join the path.
  const std::string& base = options_.base_url;
  const auto scheme_end = base.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::kConfigInvalid, "bad catalog url " + base);
  const auto path_start = base.find('/', scheme_end + 3);
  const std::string origin = base.substr(0, path_start);
  const std::string prefix = path_start == std::string::npos ? "" : base.substr(path_start);

  limiter_.acquire();
  httplib::Client cli(origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(options_.timeout_seconds));
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  auto res = cli.Get(prefix + path_and_query);
  if (!res) {
    fail(ErrorKind::kMalformedResponse, "catalog request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) {
    double retry = 0.0;
    if (res->has_header("Retry-After")) {
      try {
        retry = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
        retry = 0.0;
      }
    }
    throw RateLimitedError("catalog rate limit exceeded", retry);
  }
  if (res->status == 404) fail(ErrorKind::kNotFound, "catalog returned 404");
  if (res->status != 200) {
    fail(ErrorKind::kMalformedResponse, "catalog returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

GeneRecord EutilsSource::lookup(std::string_view symbol) {
  std::string key = options_.api_key.empty() ? "" : "&api_key=" + url_encode(options_.api_key);
  const std::string term =
      url_encode(std::string(symbol) + "[sym] AND " + options_.organism + "[orgn]");
  const json search =
      parse_json(get("/esearch.fcgi?db=gene&retmode=json&term=" + term + key), "esearch");
  std::string id;
  try {
    const auto& ids = search.at("esearchresult").at("idlist");
    if (ids.empty()) fail(ErrorKind::kNotFound, "gene not in catalog: " + std::string(symbol));
    id = ids.at(0).get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kMalformedResponse, std::string("esearch: ") + e.what());
  }

  const json summary =
      parse_json(get("/esummary.fcgi?db=gene&retmode=json&id=" + url_encode(id) + key), "esummary");
  try {
    const json& doc = summary.at("result").at(id);
    GeneRecord r;
    r.symbol = doc.at("name").get<std::string>();
    r.full_name = doc.value("description", std::string());
    for (const auto& a : text::split(doc.value("otheraliases", std::string()), ',')) {
      r.aliases.emplace_back(text::trim(a));
    }
    r.summary = doc.value("summary", std::string());
    r.ensembl_id = doc.value("ensembl_id", std::string());
    r.hgnc_id = doc.value("hgnc_id", std::string());
    if (!doc.contains("type_of_gene")) {
      fail(ErrorKind::kMalformedResponse, "esummary: no type_of_gene for " + r.symbol);
    }
    r.biotype = biotype_from_ncbi(doc.at("type_of_gene").get<std::string>());
    r.normalize_aliases();
    r.validate();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kMalformedResponse, std::string("esummary: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) fail(ErrorKind::kMalformedResponse, e.what());
    throw;
  }
}

CatalogClient::CatalogClient(CatalogSource& source, std::filesystem::path cache_dir)
    : source_(source), cache_dir_(std::move(cache_dir)) {}

std::filesystem::path CatalogClient::cache_path(std::string_view symbol) const {
  return cache_dir_ / "genes" / (file_safe(symbol) + ".record");
}

GeneRecord CatalogClient::fetch(std::string_view symbol) {
  if (symbol.empty()) fail(ErrorKind::kNotFound, "empty gene symbol");
  std::lock_guard lock(mu_);
  if (const auto it = memory_.find(symbol); it != memory_.end()) return it->second;

  const std::string version = source_.version();
  if (!cache_dir_.empty()) {
    const auto path = cache_path(symbol);
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
      try {
        const json doc = json::parse(read_file(path));
        if (doc.at("catalog_version").get<std::string>() == version) {
          GeneRecord r = record_from(doc.at("record"));
          memory_.emplace(std::string(symbol), r);
          return r;
        }
      } catch (const std::exception&) {
        // Unreadable entry: fall through and refetch.
      }
    }
  }

  ++remote_lookups_;
  GeneRecord r = source_.lookup(symbol);
  if (!cache_dir_.empty()) {
    const auto path = cache_path(symbol);
    std::filesystem::create_directories(path.parent_path());
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << ::getpid() << '.'
             << std::this_thread::get_id();
    const auto tmp = path.parent_path() / tmp_name.str();
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorKind::kIo, "cannot write " + tmp.string());
      out << json{{"catalog_version", version}, {"record", record_json(r)}}.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
  }
  memory_.emplace(std::string(symbol), r);
  return r;
}

GeneRecord fetch_gene_record(std::string_view symbol, CatalogClient& client) {
  return client.fetch(symbol);
}

}  // namespace genebench::corpus

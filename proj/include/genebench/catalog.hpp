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

#ifndef GENEBENCH_CATALOG_HPP_
#define GENEBENCH_CATALOG_HPP_

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "genebench/clock.hpp"
#include "genebench/types.hpp"

namespace genebench::corpus {

// Where gene records come from. One lookup() is one remote round trip as
// far as caching is concerned, however many HTTP calls it takes.
class CatalogSource {
 public:
  virtual ~CatalogSource() = default;
  // Throws kNotFound, kRateLimited (RateLimitedError) or kMalformedResponse.
  virtual GeneRecord lookup(std::string_view symbol) = 0;
  virtual std::string version() const = 0;
};

// Records held in a JSON document:
//
//   {"catalog_version": "fixture-1",
//    "genes": [{"symbol": "TP53", "full_name": "...", "aliases": ["P53"],
//               "ensembl_id": "ENSG00000141510", "hgnc_id": "HGNC:11998",
//               "biotype": "protein_coding", "summary": "..."}, ...]}
//
// "summary" and "aliases" may be omitted.
class FixtureSource : public CatalogSource {
 public:
  explicit FixtureSource(std::string_view json_text);
  static FixtureSource load(const std::string& path);
  static FixtureSource from_records(std::string version, const std::vector<GeneRecord>& records);

  GeneRecord lookup(std::string_view symbol) override;
  std::string version() const override { return version_; }
  const std::map<std::string, std::string>& raw() const { return raw_; }

 private:
  FixtureSource() = default;
  std::string version_;
  // Unparsed record JSON per symbol so that a bad record only fails when it
  // is asked for.
  std::map<std::string, std::string> raw_;
};

struct EutilsOptions {
  std::string base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
  std::string api_key;        // optional
  std::string organism = "human";
  double rate_limit = 3.0;    // requests per second
  double timeout_seconds = 30.0;
  std::string version = "eutils";
};

// esearch.fcgi (db=gene, term=SYMBOL[sym] AND ORGANISM[orgn], retmode=json)
// followed by esummary.fcgi for the first id. The summary document must
// carry "name", "description", "otheraliases" and "summary"; biotype and
// cross references come from "type_of_gene", "ensembl_id" and "hgnc_id".
class EutilsSource : public CatalogSource {
 public:
  EutilsSource(EutilsOptions options, Clock& clock = system_clock());

  GeneRecord lookup(std::string_view symbol) override;
  std::string version() const override { return options_.version; }

 private:
  std::string get(const std::string& path);

  EutilsOptions options_;
  RateLimiter limiter_;
};

// Maps an NCBI type_of_gene string onto a biotype. Throws kMalformedResponse
// for anything unrecognised.
Biotype biotype_from_ncbi(std::string_view type_of_gene);

// JSON (de)serialization shared by the fixture format and the disk cache.
std::string record_to_json(const GeneRecord& record);
GeneRecord record_from_json(std::string_view json_text);

// Memory and disk cache in front of a source. Disk entries live at
// <cache_dir>/genes/<symbol>.record as {"catalog_version": ..., "record":
// {...}} and are ignored when the version differs. Writes go through a
// temporary file and a rename, so concurrent writers never expose a partial
// file. Thread-safe.
class CatalogClient {
 public:
  explicit CatalogClient(CatalogSource& source, std::filesystem::path cache_dir = {});

  GeneRecord fetch(std::string_view symbol);
  std::size_t remote_lookups() const { return remote_lookups_.load(); }
  std::string version() const { return source_.version(); }
  std::filesystem::path cache_path(std::string_view symbol) const;

 private:
  CatalogSource& source_;
  std::filesystem::path cache_dir_;
  std::mutex mu_;
  std::map<std::string, GeneRecord, std::less<>> memory_;
  std::atomic<std::size_t> remote_lookups_{0};
};

GeneRecord fetch_gene_record(std::string_view symbol, CatalogClient& client);

}  // namespace genebench::corpus

#endif  // GENEBENCH_CATALOG_HPP_

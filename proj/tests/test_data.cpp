// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "tailscore/data.hpp"
#include "tailscore/error.hpp"
#include "tailscore/eval.hpp"
#include "tailscore/random.hpp"

using namespace tailscore;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("mean-shift generator") {
  DatasetSpec spec;
  spec.kind = DatasetKind::mean_shift_laplace;
  spec.n = 100000;
  Rng rng(1);
  const auto data = generate(spec, rng);
  std::vector<double> xs;
  for (const auto& p : data) xs.push_back(p.x);
  CHECK(std::abs(empirical_quantile(xs, 0.5) - 2.0) < 0.1);
  CHECK(*std::min_element(xs.begin(), xs.end()) >= 1.0);
  Rng again(1);
  CHECK(generate(spec, again) == data);
}

TEST_CASE("correlated gaussian generator") {
  DatasetSpec spec;
  spec.kind = DatasetKind::correlated_gaussian;
  spec.n = 100000;
  spec.rho = 0.4;
  Rng rng(2);
  const auto data = generate(spec, rng);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (const auto& p : data) {
    sx += p.x;
    sy += p.y;
    sxx += p.x * p.x;
    syy += p.y * p.y;
    sxy += p.x * p.y;
  }
  const double n = static_cast<double>(data.size());
  const double corr = (sxy / n - sx * sy / (n * n)) /
                      std::sqrt((sxx / n - sx * sx / (n * n)) * (syy / n - sy * sy / (n * n)));
  CHECK(std::abs(corr - 0.4) < 0.01);
}

TEST_CASE("dataset spec validation") {
  DatasetSpec spec;
  spec.rho = 1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = DatasetSpec{};
  spec.n = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = DatasetSpec{};
  spec.kind = DatasetKind::csv;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK_THROWS_AS(parse_dataset_kind("pareto"), ConfigError);
}

TEST_CASE("csv ingestion") {
  const auto ok = write_temp("ts_ok.csv", "x,y\n1,2\n3,4\n5,6\n");
  const auto r = ingest_csv(ok, "x", "y");
  CHECK(r.pairs == std::vector<DataPoint>{{1, 2}, {3, 4}, {5, 6}});
  CHECK(r.skipped == 0);

  const auto gap = write_temp("ts_gap.csv", "x,y\n1,2\n3,\n5,6\n");
  const auto g = ingest_csv(gap, "x", "y");
  CHECK(g.pairs.size() == 2);
  CHECK(g.skipped == 1);
  CHECK(g.rows == g.pairs.size() + g.skipped);

  const auto vix = write_temp("ts_vix.csv", "date,vix,ret_AAPL\n2005-01-03,14.1,0.01\n2005-01-04,13.9,-0.02\n");
  const auto v = ingest_csv(vix, "vix", "ret_AAPL");
  CHECK(v.pairs == std::vector<DataPoint>{{14.1, 0.01}, {13.9, -0.02}});

  CHECK_THROWS_AS(ingest_csv(ok, "x", "z"), SchemaError);
  CHECK_THROWS_AS(ingest_csv(std::filesystem::temp_directory_path() / "ts_missing.csv", "x", "y"), IoError);
  const auto empty = write_temp("ts_empty.csv", "x,y\n,\n");
  CHECK_THROWS_AS(ingest_csv(empty, "x", "y"), InvalidInput);
  for (const auto& p : {ok, gap, vix, empty}) std::filesystem::remove(p);
}

TEST_CASE("date range split") {
  const DateRange train{IsoDate::parse("2005-01-01"), IsoDate::parse("2007-12-31")};
  const DateRange test{IsoDate::parse("2008-01-01"), IsoDate::parse("2009-12-31")};
  const std::vector<DatedPair> rows = {{IsoDate::parse("2007-12-31"), {1, 1}},
                                       {IsoDate::parse("2008-01-01"), {2, 2}},
                                       {IsoDate::parse("2004-06-01"), {3, 3}}};
  const auto s = date_range_split(rows, train, test);
  CHECK(s.train == std::vector<DataPoint>{{1, 1}});
  CHECK(s.test == std::vector<DataPoint>{{2, 2}});
  const DateRange overlap{IsoDate::parse("2007-06-01"), IsoDate::parse("2008-06-01")};
  CHECK_THROWS_AS(date_range_split(rows, train, overlap), ConfigError);
  CHECK_THROWS_AS(IsoDate::parse("2007/01/01"), InvalidInput);
  CHECK_THROWS_AS(IsoDate::parse("2007-13-01"), InvalidInput);
  CHECK(IsoDate::parse("2007-02-03").str() == "2007-02-03");
}

TEST_CASE("pairs csv round trip") {
  const auto path = std::filesystem::temp_directory_path() / "ts_pairs.csv";
  const std::vector<DataPoint> pairs = {{0.1, 1.0 / 3.0}, {1e-300, -2.5e10}};
  write_pairs_csv(path, pairs);
  CHECK(ingest_csv(path, "x", "y").pairs == pairs);
  std::filesystem::remove(path);
}

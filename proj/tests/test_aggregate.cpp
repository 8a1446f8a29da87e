#include <algorithm>
#include <array>
#include <sstream>

#include "doctest.h"

#include "cmrwave/aggregate.hpp"
#include "cmrwave/error.hpp"
#include "support/oracles.hpp"

using namespace cmrwave;
using namespace cmrwave::testing;

namespace {

using Vec = std::array<double, 5>;

std::vector<PreparedSeries> flat_prepared(const char* first, int days, double value) {
  std::vector<PreparedSeries> out;
  for (PlaceCategory c : kAnalysisCategories) {
    PreparedSeries p;
    p.locality_id = "t";
    p.category = c;
    Date d = parse_date(first);
    for (int i = 0; i < days; ++i, d = add_days(d, 1)) p.dates.push_back(d);
    p.values.assign(static_cast<std::size_t>(days), value);
    out.push_back(std::move(p));
  }
  return out;
}

WaveSlice random_slice(Rng& rng, int days) {
  WaveSlice s;
  s.locality_id = "r";
  s.restriction_date = parse_date("2020-03-01");
  s.start_date = s.restriction_date;
  s.length_days = days;
  for (PlaceCategory c : kAnalysisCategories) {
    auto& v = s.values[c];
    for (int i = 0; i < days; ++i) v.push_back(rng.uniform());
  }
  return s;
}

Vec random_vec(Rng& rng) {
  Vec v;
  // small integer grid so equal components actually occur
  for (double& x : v) x = rng.uniform() < 0.5 ? rng.integer(0, 3) : rng.uniform(0, 3);
  return v;
}

AucVector vector_of(const Vec& v, int window = 0, int length = 56) {
  AucVector a;
  a.locality_id = "t";
  a.window_index = window;
  a.length_days = length;
  for (std::size_t i = 0; i < v.size(); ++i) a.components[kAnalysisCategories[i]] = v[i];
  return a;
}

struct Fixture {
  StudyConfig config;
  std::map<std::string, PreparedLocality> prepared;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    std::istringstream cfg(five_locality_config());
    out.config = load_study_config(cfg);
    std::istringstream csv(synthetic_cmr_csv());
    const MobilityData data = parse_cmr_csv(csv, out.config.localities);
    for (const LocalityConfig& l : out.config.localities) {
      out.prepared.emplace(l.id, prepare_locality(data.at(l.id), l, out.config));
    }
    return out;
  }();
  return f;
}

const LocalityConfig& locality(const std::string& id) {
  for (const LocalityConfig& l : fixture().config.localities) {
    if (l.id == id) return l;
  }
  throw std::out_of_range(id);
}

}  // namespace

TEST_SUITE("aggregate") {

TEST_CASE("wave 1 of lombardia starts on its restriction date") {
  const auto& p = fixture().prepared.at("lombardia");
  const WaveSlice s = slice_wave(p.series, parse_date("2020-02-23"), 56);
  CHECK(s.start_date == parse_date("2020-02-23"));
  CHECK(s.length_days == 56);
  CHECK(s.window_index == 0);
  CHECK(s.start_offset_days() == 0);
  for (const auto& [c, v] : s.values) CHECK(v.size() == 56);
  CHECK(s.values.at(PlaceCategory::Parks).front() == p.series[2].values[8]);
}

TEST_CASE("wave 2 of toronto starts on its restriction date") {
  const auto& p = fixture().prepared.at("toronto");
  const WaveSlice s = slice_wave(p.series, locality("toronto").wave2_restriction, 56, 2);
  CHECK(s.start_date == parse_date("2020-11-21"));
  CHECK(s.wave == 2);
}

TEST_CASE("slicing errors") {
  const auto p = flat_prepared("2020-03-01", 60, 0.5);
  CHECK_THROWS_AS(slice_wave(p, parse_date("2020-03-01"), 0), ValidationError);
  try {
    slice_wave(p, parse_date("2020-03-10"), 56);
    FAIL("expected a slicing error");
  } catch (const SlicingError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2020-03-10") != std::string::npos);
    CHECK(msg.find("2020-05-04") != std::string::npos);
  }
  CHECK_THROWS_AS(slice_wave(p, parse_date("2020-02-28"), 14), SlicingError);
  CHECK_NOTHROW(slice_wave(p, parse_date("2020-03-05"), 56));
}

TEST_CASE("windows start every 14 days") {
  const auto p = flat_prepared("2020-03-01", 80, 0.25);
  const WaveSlice s = slice_wave(p, parse_date("2020-03-05"), 56);
  const std::vector<WaveSlice> w = split_windows(s, 14);
  REQUIRE(w.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(w[k].window_index == k + 1);
    CHECK(w[k].start_offset_days() == 14 * k);
    CHECK(w[k].length_days == 14);
    CHECK(w[k].values.at(PlaceCategory::Workplaces).size() == 14);
  }
}

TEST_CASE("a single window equals the input") {
  Rng rng(3);
  const WaveSlice s = random_slice(rng, 56);
  const std::vector<WaveSlice> w = split_windows(s, 56);
  REQUIRE(w.size() == 1);
  CHECK(w[0].values == s.values);
  CHECK(w[0].start_date == s.start_date);
  CHECK_THROWS_AS(split_windows(s, 13), ValidationError);
  CHECK_THROWS_AS(split_windows(s, 0), ValidationError);
}

TEST_CASE("auc is the rectangle rule") {
  CHECK(auc(slice_wave(flat_prepared("2020-03-01", 56, 1.0), parse_date("2020-03-01"), 56))
            .components.at(PlaceCategory::Parks) == 56.0);
  CHECK(auc(slice_wave(flat_prepared("2020-03-01", 56, 0.0), parse_date("2020-03-01"), 56))
            .components.at(PlaceCategory::Parks) == 0.0);
  CHECK(auc(slice_wave(flat_prepared("2020-03-01", 14, 0.5), parse_date("2020-03-01"), 14))
            .components.at(PlaceCategory::Workplaces) == 7.0);
  CHECK_THROWS_AS(auc(slice_wave(flat_prepared("2020-03-01", 14, 1.5), parse_date("2020-03-01"), 14)),
                  RangeError);
}

TEST_CASE("property: auc is additive over windows") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const WaveSlice s = random_slice(rng, 56);
    const AucVector whole = auc(s);
    std::map<PlaceCategory, double> sum;
    for (const WaveSlice& w : split_windows(s, 14)) {
      for (const auto& [c, v] : auc(w).components) sum[c] += v;
    }
    for (const auto& [c, v] : whole.components) {
      CHECK(std::abs(sum[c] - v) <= 1e-9);
      CHECK(v >= 0.0);
      CHECK(v <= 56.0);
    }
  }
}

TEST_CASE("dominance examples") {
  const Vec ones = {1, 1, 1, 1, 1}, twos = {2, 2, 2, 2, 2}, mixed = {1, 3, 1, 1, 1};
  CHECK(dominance(ones, twos) == DominanceRelation::Dominates);
  CHECK(dominance(twos, ones) == DominanceRelation::DominatedBy);
  CHECK(dominance(ones, ones) == DominanceRelation::Equal);
  CHECK(dominance(mixed, twos) == DominanceRelation::Incomparable);
  const Vec touching = {1, 2, 2, 2, 2};
  CHECK(dominance(touching, twos) == DominanceRelation::Dominates);
  const Vec close = {2 + 1e-12, 2, 2, 2, 2 - 1e-12};
  CHECK(dominance(close, twos, 1e-9) == DominanceRelation::Equal);
  CHECK(dominance(close, twos, 0.0) == DominanceRelation::Incomparable);
}

TEST_CASE("dominance rejects mismatched vectors") {
  const Vec v = {1, 1, 1, 1, 1};
  AucVector a = vector_of(v), b = vector_of(v);
  b.components.erase(PlaceCategory::Parks);
  CHECK_THROWS_AS(dominance(a, b), ComparisonError);
  CHECK_THROWS_AS(dominance(vector_of(v, 1, 14), vector_of(v, 2, 14)), ComparisonError);
  CHECK_THROWS_AS(dominance(vector_of(v, 0, 56), vector_of(v, 0, 14)), ComparisonError);
  CHECK(dominance(vector_of(v), vector_of(v)) == DominanceRelation::Equal);
  const std::vector<double> three = {1, 2, 3};
  CHECK_THROWS_AS(dominance(three, std::span<const double>(v)), ComparisonError);
}

TEST_CASE("property: dominance matches the brute-force oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 10000; ++trial) {
    const Vec a = random_vec(rng), b = random_vec(rng);
    const double eps = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0, 0.5);
    CHECK(dominance(a, b, eps) == dominance_oracle(a, b, eps));
    CHECK(dominance(b, a, eps) == converse(dominance(a, b, eps)));
  }
}

TEST_CASE("property: dominates is a strict partial order") {
  Rng rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const Vec a = random_vec(rng), b = random_vec(rng), c = random_vec(rng);
    CHECK(dominance(a, a) == DominanceRelation::Equal);
    if (dominance(a, b) == DominanceRelation::Dominates) {
      CHECK(dominance(b, a) != DominanceRelation::Dominates);
      if (dominance(b, c) == DominanceRelation::Dominates) {
        CHECK(dominance(a, c) == DominanceRelation::Dominates);
      }
    }
  }
}

TEST_CASE("property: scaling and permuting components keep the relation") {
  Rng rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    Vec a = random_vec(rng), b = random_vec(rng);
    const DominanceRelation r = dominance(a, b);
    const double k = rng.uniform(0.1, 100.0);
    Vec ka = a, kb = b;
    for (std::size_t i = 0; i < 5; ++i) {
      ka[i] *= k;
      kb[i] *= k;
    }
    CHECK(dominance(ka, kb) == r);
    std::array<std::size_t, 5> perm = {0, 1, 2, 3, 4};
    for (std::size_t i = 4; i > 0; --i) {
      std::swap(perm[i], perm[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i)))]);
    }
    Vec pa, pb;
    for (std::size_t i = 0; i < 5; ++i) {
      pa[i] = a[perm[i]];
      pb[i] = b[perm[i]];
    }
    CHECK(dominance(pa, pb) == r);
  }
}

TEST_CASE("relation names round-trip") {
  for (DominanceRelation r : {DominanceRelation::Dominates, DominanceRelation::DominatedBy,
                              DominanceRelation::Incomparable, DominanceRelation::Equal}) {
    CHECK(parse_relation(to_string(r)) == r);
    CHECK(converse(converse(r)) == r);
  }
  CHECK_THROWS_AS(parse_relation("Better"), ValidationError);
}

TEST_CASE("compare_waves gives five comparisons") {
  const auto& p = fixture().prepared.at("lombardia");
  const ComparisonReport r = compare_waves(p.series, locality("lombardia"), fixture().config);
  CHECK(r.locality_id == "lombardia");
  REQUIRE(r.records.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    const ComparisonRecord& rec = r.records[k];
    CHECK(rec.window_index == static_cast<int>(k));
    CHECK(rec.length_days == (k == 0 ? 56 : 14));
    CHECK(rec.start_offset_days == (k == 0 ? 0 : 14 * static_cast<long>(k - 1)));
    CHECK(rec.wave1.start_date == add_days(parse_date("2020-02-23"), rec.start_offset_days));
    CHECK(rec.wave2.start_date == add_days(parse_date("2020-11-06"), rec.start_offset_days));
    CHECK(rec.relation == dominance(rec.wave1, rec.wave2, fixture().config.epsilon));
  }
  // the synthetic first wave is much deeper than the second
  CHECK(r.records[0].relation == DominanceRelation::Dominates);
}

TEST_CASE("reports round-trip through text") {
  std::ostringstream out;
  std::vector<ComparisonReport> reports;
  for (const LocalityConfig& l : fixture().config.localities) {
    reports.push_back(compare_waves(fixture().prepared.at(l.id).series, l, fixture().config));
    write_report(out, reports.back());
  }
  std::istringstream in(out.str());
  const std::vector<ComparisonReport> back = read_report(in);
  REQUIRE(back.size() == reports.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].locality_id == reports[i].locality_id);
    REQUIRE(back[i].records.size() == reports[i].records.size());
    for (std::size_t k = 0; k < back[i].records.size(); ++k) {
      const ComparisonRecord& a = back[i].records[k];
      const ComparisonRecord& b = reports[i].records[k];
      CHECK(a.relation == b.relation);
      CHECK(a.wave1.components == b.wave1.components);
      CHECK(a.wave2.components == b.wave2.components);
      CHECK(a.wave2.start_date == b.wave2.start_date);
      CHECK(a.start_offset_days == b.start_offset_days);
    }
  }
  std::istringstream junk("not a report\n");
  CHECK_THROWS_AS(read_report(junk), SchemaError);
}

}

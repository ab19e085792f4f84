#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "gsvma/dataset.hpp"
#include "gsvma/kernels.hpp"
#include "qp_oracle.hpp"

using namespace gsvma;
namespace ds = gsvma::dataset;

namespace {

const char* kSchemaText = R"(# toy clinical layout
target = Cath
positive = Cad
negative = Normal
feature.Age = numeric
feature.Sex = binary(Fmale,Male)
feature.VHD = multi(N,mild,Moderate,Severe)
)";

ds::RawSchema toy_schema() {
  std::istringstream in(kSchemaText);
  return ds::load_schema(in);
}

ds::RawDataset parse(const std::string& csv) {
  std::istringstream in(csv);
  return ds::parse_csv(in, toy_schema());
}

const char* kGoodCsv =
    "Age,Sex,VHD,Cath\n"
    "54,Male,mild,Cad\n"
    "61,Fmale,N,Normal\n"
    "47,Male,Severe,Cad\n";

}  // namespace

TEST_CASE("schema parsing recovers kinds, values and order") {
  const ds::RawSchema schema = toy_schema();
  REQUIRE(schema.features.size() == 3);
  CHECK(schema.features[0].name == "Age");
  CHECK(schema.features[0].kind == ds::FeatureKind::Numeric);
  CHECK(schema.features[1].values == std::vector<std::string>{"Fmale", "Male"});
  CHECK(schema.features[2].values == std::vector<std::string>{"N", "mild", "Moderate", "Severe"});
  CHECK(schema.target == "Cath");
  CHECK(schema.positive_label == "Cad");
}

TEST_CASE("schema rejects malformed input") {
  const auto bad = [](const char* text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(ds::load_schema(in), InvalidConfig);
  };
  bad("feature.X = numeric\n");                                    // no target
  bad("target = T\npositive = a\nnegative = b\n");                 // no features
  bad("target = T\npositive = a\nnegative = b\nfeature.X = odd\n");
  bad("target = T\npositive = a\nnegative = b\nfeature.X = binary(a)\n");
  bad("target = T\npositive = a\nnegative = a\nfeature.X = numeric\n");
  bad("target = X\npositive = a\nnegative = b\nfeature.X = numeric\n");
}

TEST_CASE("parse_csv on a well-formed file") {
  const ds::RawDataset raw = parse(kGoodCsv);
  REQUIRE(raw.size() == 3);
  CHECK(raw.targets == std::vector<std::string>{"Cad", "Normal", "Cad"});
  CHECK(std::get<double>(raw.records[0][0]) == 54.0);
  CHECK(std::get<std::string>(raw.records[1][1]) == "Fmale");
}

TEST_CASE("parse_csv accepts shuffled header order") {
  const ds::RawDataset raw = parse(
      "Cath,VHD,Age,Sex\n"
      "Cad,mild,54,Male\n");
  REQUIRE(raw.size() == 1);
  CHECK(std::get<double>(raw.records[0][0]) == 54.0);
  CHECK(std::get<std::string>(raw.records[0][2]) == "mild");
}

TEST_CASE("parse_csv: header only gives zero records") {
  CHECK(parse("Age,Sex,VHD,Cath\n").size() == 0);
}

TEST_CASE("parse_csv error taxonomy") {
  CHECK_THROWS_AS(parse("Age,Sex,Cath\nx\n"), ds::MissingColumn);
  CHECK_THROWS_AS(parse("Age,Sex,VHD,Cath,Extra\nx\n"), ds::UnknownColumn);
  CHECK_THROWS_WITH_AS(parse("Age,Age,Sex,VHD,Cath\nx\n"), doctest::Contains("duplicate"),
                       ds::UnknownColumn);
  CHECK_THROWS_AS(parse("Age,Sex,VHD,Cath\n,Male,mild,Cad\n"), ds::MissingValue);
  CHECK_THROWS_AS(parse("Age,Sex,VHD,Cath\n54,Male,odd,Cad\n"), ds::IllegalNominalValue);
  CHECK_THROWS_AS(parse("Age,Sex,VHD,Cath\nold,Male,mild,Cad\n"), ds::NonNumericCell);
  CHECK_THROWS_AS(parse("Age,Sex,VHD,Cath\n54,Male,mild,Maybe\n"), ds::IllegalNominalValue);
  try {
    parse("Age,Sex,VHD,Cath\n54,Male,mild,Cad\n,Male,mild,Cad\n");
    FAIL("expected MissingValue");
  } catch (const ds::MissingValue& e) {
    CHECK(e.record == 1);
    CHECK(e.column == "Age");
  }
}

TEST_CASE("encode expands one-hot columns and maps labels") {
  const ds::EncodedDataset enc = ds::encode(parse(kGoodCsv));
  REQUIRE(enc.n_columns() == 6);  // Age, Sex, VHD x 4
  const auto names = enc.column_names();
  CHECK(names == std::vector<std::string>{"Age", "Sex", "VHD=N", "VHD=mild", "VHD=Moderate",
                                          "VHD=Severe"});
  // row 0: 54, Male, mild
  CHECK(enc.x(0, 0) == 54.0);
  CHECK(enc.x(0, 1) == 1.0);  // Male = second declared value -> 1
  CHECK(enc.x(0, 2) == 0.0);
  CHECK(enc.x(0, 3) == 1.0);
  CHECK(enc.x(0, 4) == 0.0);
  CHECK(enc.x(0, 5) == 0.0);
  // row 1: Fmale -> 0
  CHECK(enc.x(1, 1) == 0.0);
  CHECK(enc.labels == std::vector<int>{+1, -1, +1});
  CHECK_FALSE(enc.scaler.has_value());
}

TEST_CASE("encode keeps an all-numeric schema unchanged") {
  std::istringstream schema_in(
      "target = T\npositive = a\nnegative = b\n"
      "feature.u = numeric\nfeature.v = numeric\n");
  const ds::RawSchema schema = ds::load_schema(schema_in);
  std::istringstream csv("u,v,T\n1.5,-2,a\n0,3.25,b\n");
  const ds::EncodedDataset enc = ds::encode(ds::parse_csv(csv, schema));
  REQUIRE(enc.n_columns() == 2);
  CHECK(enc.x(0, 0) == 1.5);
  CHECK(enc.x(0, 1) == -2.0);
  CHECK(enc.x(1, 0) == 0.0);
  CHECK(enc.x(1, 1) == 3.25);
}

TEST_CASE("one-hot columns of each row sum to one; metadata round-trips") {
  Rng rng(7);
  std::ostringstream csv;
  csv << "Age,Sex,VHD,Cath\n";
  const char* vhd[] = {"N", "mild", "Moderate", "Severe"};
  for (int r = 0; r < 40; ++r)
    csv << rng.index(90) << ',' << (rng.bernoulli(0.5) ? "Male" : "Fmale") << ','
        << vhd[rng.index(4)] << ',' << (rng.bernoulli(0.5) ? "Cad" : "Normal") << '\n';
  const ds::EncodedDataset enc = ds::encode(parse(csv.str()));

  for (std::size_t r = 0; r < enc.n_samples(); ++r) {
    double one_hot_sum = 0.0;
    for (std::size_t c = 0; c < enc.n_columns(); ++c)
      if (enc.columns[c].source == "VHD") one_hot_sum += enc.x(r, c);
    CHECK(one_hot_sum == 1.0);
  }

  // decode: source names in order, one-hot values in declared order
  std::vector<std::string> sources;
  std::map<std::string, std::vector<std::string>> values;
  for (const auto& col : enc.columns) {
    if (sources.empty() || sources.back() != col.source) sources.push_back(col.source);
    if (col.value) values[col.source].push_back(*col.value);
  }
  CHECK(sources == std::vector<std::string>{"Age", "Sex", "VHD"});
  CHECK(values["VHD"] == std::vector<std::string>{"N", "mild", "Moderate", "Severe"});
}

TEST_CASE("normalize: global endpoints, constant columns, per-fold fit") {
  ds::EncodedDataset data;
  data.x = Matrix::from_rows({{10.0, 5.0, 0.0}, {20.0, 5.0, 1.0}, {30.0, 5.0, 0.5}});
  data.columns = {{"a", {}}, {"b", {}}, {"c", {}}};
  data.labels = {+1, -1, +1};

  SUBCASE("global scales to [0,1] endpoints") {
    const auto norm = ds::normalize(data, ds::NormalizePolicy::Global);
    CHECK(norm.x(0, 0) == 0.0);
    CHECK(norm.x(1, 0) == 0.5);
    CHECK(norm.x(2, 0) == 1.0);
    REQUIRE(norm.scaler.has_value());
    CHECK(norm.scaler->min[0] == 10.0);
    CHECK(norm.scaler->max[0] == 30.0);
  }
  SUBCASE("constant column maps to zero") {
    const auto norm = ds::normalize(data, ds::NormalizePolicy::Global);
    for (std::size_t r = 0; r < 3; ++r) CHECK(norm.x(r, 1) == 0.0);
  }
  SUBCASE("per-fold fit applies the fit-set stats to every row") {
    const std::vector<std::size_t> fit = {0};
    const auto norm = ds::normalize(data, ds::NormalizePolicy::PerFoldFit, fit);
    // column c: min = max = 0 on the fit set, so the whole column -> 0
    CHECK(norm.x(0, 2) == 0.0);
    CHECK(norm.x(1, 2) == 0.0);
    CHECK(norm.x(2, 2) == 0.0);
  }
  SUBCASE("empty fit set") {
    CHECK_THROWS_AS(ds::normalize(data, ds::NormalizePolicy::PerFoldFit), ds::EmptyFitSet);
  }
  SUBCASE("out-of-range fit row") {
    const std::vector<std::size_t> bad = {0, 9};
    CHECK_THROWS_AS(ds::normalize(data, ds::NormalizePolicy::PerFoldFit, bad), InvalidConfig);
  }
}

TEST_CASE("normalize(Global) property: min 0 and max 1 unless constant") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rng.index(30), cols = 1 + rng.index(6);
    ds::EncodedDataset data;
    data.x = Matrix(n, cols);
    data.labels.assign(n, 1);
    for (std::size_t c = 0; c < cols; ++c) {
      data.columns.push_back({"c" + std::to_string(c), {}});
      const bool constant = rng.bernoulli(0.2);
      const double base = rng.uniform(-5.0, 5.0);
      for (std::size_t r = 0; r < n; ++r)
        data.x(r, c) = constant ? base : rng.uniform(-5.0, 5.0);
    }
    const auto norm = ds::normalize(data, ds::NormalizePolicy::Global);
    for (std::size_t c = 0; c < cols; ++c) {
      double lo = norm.x(0, c), hi = lo;
      for (std::size_t r = 0; r < n; ++r) {
        lo = std::min(lo, norm.x(r, c));
        hi = std::max(hi, norm.x(r, c));
      }
      if (norm.scaler->min[c] == norm.scaler->max[c]) {
        CHECK(lo == 0.0);
        CHECK(hi == 0.0);
      } else {
        CHECK(lo == 0.0);
        CHECK(hi == 1.0);
      }
    }
  }
}

TEST_CASE("stratified_kfold on the paper's class balance") {
  std::vector<int> labels(303);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i < 216 ? +1 : -1;
  const ds::FoldPlan plan = ds::stratified_kfold(labels, 10, 42);

  std::vector<int> size(10, 0), pos(10, 0), neg(10, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int f = plan.assignments[i];
    REQUIRE(f >= 0);
    REQUIRE(f < 10);
    ++size[f];
    ++(labels[i] > 0 ? pos[f] : neg[f]);
  }
  for (int f = 0; f < 10; ++f) {
    CHECK((size[f] == 30 || size[f] == 31));
    CHECK((pos[f] == 21 || pos[f] == 22));
    CHECK((neg[f] == 8 || neg[f] == 9));
  }
}

TEST_CASE("stratified_kfold balanced tiny case and errors") {
  std::vector<int> labels = {1, 1, 1, 1, 1, -1, -1, -1, -1, -1};
  const ds::FoldPlan plan = ds::stratified_kfold(labels, 5, 3);
  std::vector<int> pos(5, 0), neg(5, 0);
  for (std::size_t i = 0; i < labels.size(); ++i)
    ++(labels[i] > 0 ? pos : neg)[plan.assignments[i]];
  for (int f = 0; f < 5; ++f) {
    CHECK(pos[f] == 1);
    CHECK(neg[f] == 1);
  }

  const std::vector<int> three = {1, -1, 1};
  CHECK_THROWS_AS(ds::stratified_kfold(three, 10, 1), ds::TooFewSamples);
  CHECK_THROWS_AS(ds::stratified_kfold(three, 1, 1), InvalidConfig);
}

TEST_CASE("stratified_kfold invariants over random inputs; deterministic") {
  Rng rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 20 + rng.index(200);
    const int k = 2 + static_cast<int>(rng.index(9));
    std::vector<int> labels(n);
    for (auto& y : labels) y = rng.bernoulli(0.3) ? 1 : -1;
    const std::uint64_t seed = rng.next();

    const ds::FoldPlan plan = ds::stratified_kfold(labels, k, seed);
    CHECK(plan == ds::stratified_kfold(labels, k, seed));

    std::vector<int> size(k, 0), pos(k, 0);
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ++size[plan.assignments[i]];
      if (labels[i] > 0) {
        ++pos[plan.assignments[i]];
        ++n_pos;
      }
    }
    const auto [size_lo, size_hi] = std::minmax_element(size.begin(), size.end());
    CHECK(*size_hi - *size_lo <= 1);
    for (int f = 0; f < k; ++f) {
      const double ideal = static_cast<double>(n_pos) / k;
      CHECK(std::abs(pos[f] - ideal) <= 1.0);
    }
  }
}

TEST_CASE("synth_generate: noise-free data is separable on the planted columns") {
  const ds::SynthDataset synth = ds::synth_generate(60, 6, 2, 0.0, 99);
  REQUIRE(synth.informative.size() == 2);

  // oracle check: a linear SVM restricted to the planted columns separates
  Matrix planted(synth.data.n_samples(), 2);
  for (std::size_t r = 0; r < synth.data.n_samples(); ++r)
    for (std::size_t j = 0; j < 2; ++j) planted(r, j) = synth.data.x(r, synth.informative[j]);
  const Matrix g = kernels::gram(kernels::KernelSpec::linear(), planted);
  const auto sol = qp_oracle::solve(g, synth.data.labels, 100.0);
  const auto decisions = qp_oracle::train_decisions(g, synth.data.labels, sol);
  for (std::size_t i = 0; i < decisions.size(); ++i)
    CHECK(decisions[i] * synth.data.labels[i] > 0.0);
}

TEST_CASE("synth_generate boundaries and config errors") {
  const ds::SynthDataset all = ds::synth_generate(30, 4, 4, 0.0, 5);
  CHECK(all.informative == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(ds::synth_generate(10, 4, 0, 0.0, 1), InvalidConfig);
  CHECK_THROWS_AS(ds::synth_generate(10, 4, 5, 0.0, 1), InvalidConfig);
  CHECK_THROWS_AS(ds::synth_generate(10, 4, 2, -1.0, 1), InvalidConfig);
}

TEST_CASE("synth_generate: heavy noise drives accuracy toward the class prior") {
  // With noise far above the signal the labels are almost pure coin flips,
  // so even the planted columns cannot classify well.
  double acc_sum = 0.0;
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ds::SynthDataset synth = ds::synth_generate(120, 5, 2, 10.0, seed);
    std::size_t n_pos = 0;
    for (const int y : synth.data.labels) n_pos += (y > 0);
    if (n_pos == 0 || n_pos == synth.data.n_samples()) continue;

    Matrix planted(synth.data.n_samples(), 2);
    for (std::size_t r = 0; r < synth.data.n_samples(); ++r)
      for (std::size_t j = 0; j < 2; ++j) planted(r, j) = synth.data.x(r, synth.informative[j]);
    const Matrix g = kernels::gram(kernels::KernelSpec::linear(), planted);
    const auto sol = qp_oracle::solve(g, synth.data.labels, 1.0);
    const auto decisions = qp_oracle::train_decisions(g, synth.data.labels, sol);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i)
      correct += ((decisions[i] >= 0.0 ? 1 : -1) == synth.data.labels[i]);
    const double prior =
        std::max(n_pos, synth.data.n_samples() - n_pos) / static_cast<double>(synth.data.n_samples());
    acc_sum += static_cast<double>(correct) / static_cast<double>(synth.data.n_samples()) - prior;
    ++runs;
  }
  REQUIRE(runs > 0);
  CHECK(acc_sum / runs <= 0.15);  // training accuracy stays near the prior
}

TEST_CASE("encoded CSV dump has generated names and a label column") {
  const ds::EncodedDataset enc = ds::encode(parse(kGoodCsv));
  std::ostringstream out;
  ds::write_encoded_csv(out, enc);
  const std::string text = out.str();
  CHECK(text.find("VHD=mild") != std::string::npos);
  CHECK(text.find(",label\n") != std::string::npos);
  CHECK(text.find("+1") != std::string::npos);
}

TEST_CASE("mask_from_columns resolves names and rejects unknowns") {
  const ds::EncodedDataset enc = ds::encode(parse(kGoodCsv));
  const std::vector<std::string> picks = {"Age", "VHD=mild"};
  const auto mask = ds::mask_from_columns(enc, picks);
  CHECK(mask == std::vector<std::uint8_t>{1, 0, 0, 1, 0, 0});
  const std::vector<std::string> bad = {"Nope"};
  CHECK_THROWS_AS(ds::mask_from_columns(enc, bad), InvalidConfig);
}

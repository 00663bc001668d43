#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "json.hpp"
#include "quasimean/stats.hpp"
#include "test_util.hpp"

using namespace quasimean;
using qmtest::Q;
using qmtest::R;
using qmtest::T;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "quasimean");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempFile {
 public:
  TempFile(const std::string& name, const std::string& content)
      : path_(std::filesystem::temp_directory_path() / ("quasimean_test_" + name)) {
    std::ofstream(path_, std::ios::binary) << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

nlohmann::json parse_json(const std::string& s) { return nlohmann::json::parse(s); }

}  // namespace

TEST(Csv, QuotedFieldsAndLineEndings) {
  std::istringstream in("name,\"x, y\",z\r\n\"a \"\"b\"\"\",1,\"2\r\n3\"\r\nlast,4,5");
  const auto rows = read_csv(in);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][1], "x, y");
  EXPECT_EQ(rows[1][0], "a \"b\"");
  EXPECT_EQ(rows[1][2], "2\r\n3");
  EXPECT_EQ(rows[2][2], "5");
}

TEST(Csv, ColumnByName) {
  std::istringstream in("id,value\n1,2.5\n2,-3\n");
  const auto v = csv_column(in, "value");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].render(), "2.5");
  EXPECT_EQ(v[1].render(), "-3");
}

TEST(Csv, MissingColumnIsUsage) {
  std::istringstream in("id,value\n1,2\n");
  EXPECT_THROW(csv_column(in, "other"), UsageError);
}

TEST(Csv, NonNumericCellReportsItsRow) {
  std::istringstream in("value\n1\nabc\n");
  try {
    csv_column(in, "value");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(Estimators, BesselPlusOnOneToTen) {
  std::vector<Real> v;
  for (int i = 1; i <= 10; ++i) v.push_back(Real(i));
  const auto r = apply_estimator("bessel-plus", RealTuple(v), 0);
  ASSERT_TRUE(r.value.has_value());
  EXPECT_EQ(*r.value, Q(55, 9));
  EXPECT_TRUE(r.mean_like);
}

TEST(Estimators, BesselPlusOnAPairIsNotMeanLike) {
  const auto r = apply_estimator("bessel-plus", T({"1", "2"}), 0);
  EXPECT_EQ(r.value->render(), "3");
  EXPECT_FALSE(r.mean_like);
}

TEST(Estimators, TrimmedOnEqualValues) {
  const auto r = apply_estimator("trimmed-k3", T({"4.2", "4.2", "4.2"}), 0);
  ASSERT_TRUE(r.value.has_value());
  EXPECT_EQ(*r.value, R("4.2") / Real(3));
  EXPECT_FALSE(r.mean_like);
}

TEST(Estimators, PrecisionFillsTheScale) {
  EXPECT_EQ(resolve_estimator("floor-arith", 2), "floor-arith?m=2");
  EXPECT_EQ(resolve_estimator("floor-arith?m=1", 2), "floor-arith?m=1");
  EXPECT_EQ(resolve_estimator("arith", 2), "arith");
  EXPECT_EQ(apply_estimator("floor-arith", T({"1.04", "1.07"}), 1).value->render(), "1");
}

TEST(Estimators, UndefinedValueIsReportedNotThrown) {
  const auto r = apply_estimator("geo", T({"-1", "2"}), 0);
  EXPECT_FALSE(r.value.has_value());
  EXPECT_FALSE(r.error.empty());
}

TEST(BoxFlag, Forms) {
  const auto b = cli::parse_box("(0:1]", Arity::fixed(2));
  EXPECT_FALSE(b.contains(T({"0", "1"})));
  EXPECT_TRUE(b.contains(T({"0.5", "1"})));
  EXPECT_TRUE(cli::parse_box("-inf:inf", Arity::fixed(2)).contains(T({"-1e9", "1e9"})));
  EXPECT_THROW(cli::parse_box("2:1", Arity::fixed(2)), UsageError);
  EXPECT_THROW(cli::parse_box("0-1", Arity::fixed(2)), UsageError);
}

TEST(Cli, EvalExamples) {
  EXPECT_EQ(invoke({"eval", "bessel-plus", "1", "2"}).out, "3\n");
  EXPECT_EQ(invoke({"eval", "floor-arith?m=0", "2.1", "3"}).out, "2.5\n");
  EXPECT_EQ(invoke({"eval", "arith", "5"}).out, "5\n");
  const auto j = parse_json(invoke({"eval", "arith", "1", "2", "--format", "json"}).out);
  EXPECT_EQ(j["schema"], "quasimean/1");
  EXPECT_EQ(j["value"], "1.5");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"eval", "bessel-plus", "1", "2"}).code, 0);
  EXPECT_EQ(invoke({"eval", "geo", "-1", "2"}).code, 2);
  EXPECT_EQ(invoke({"eval", "arith", "x"}).code, 64);
  EXPECT_EQ(invoke({"eval", "no-such-mean", "1"}).code, 64);
  EXPECT_EQ(invoke({"bogus"}).code, 64);
  EXPECT_EQ(invoke({}).code, 64);
  EXPECT_EQ(invoke({"iterate", "compound", "arith"}).code, 64);
  EXPECT_EQ(invoke({"dualize", "a1 +"}).code, 64);
  EXPECT_EQ(invoke({"measure", "volume", "arith"}).code, 64);
}

TEST(Cli, ClassifyReportsTheMatrix) {
  const auto o = invoke({"classify", "arith", "--budget", "300"});
  EXPECT_EQ(o.code, 0) << o.err;
  const auto j = parse_json(o.out);
  EXPECT_EQ(j["schema"], "quasimean/1");
  EXPECT_EQ(j["seed"], 0);
  EXPECT_FALSE(j["declared_falsified"].get<bool>());
  EXPECT_FALSE(j["matrix"].empty());
}

TEST(Cli, RandomizedOutputIsByteIdentical) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"classify", "floor-arith?m=0", "--budget", "300", "--seed", "7"},
        std::vector<std::string>{"measure", "mdist", "star-arith?m=0", "--budget", "500", "--seed", "3"},
        std::vector<std::string>{"measure", "mdista", "floor-arith?m=1", "--box", "1:2", "--samples", "5000"}}) {
    const auto a = invoke(args), b = invoke(args);
    EXPECT_EQ(a.out, b.out) << args[0];
    EXPECT_EQ(a.code, b.code);
  }
}

TEST(Cli, IterateCsvTrace) {
  const auto o = invoke({"iterate", "extend3", "floor-arith?m=0", "1.1", "2.1", "3.1", "--format", "csv"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "step,a,b,c");
  EXPECT_NE(o.out.find("1,1.5,2,2.5\n"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("4,1,1,1\n"), std::string::npos) << o.out;
}

TEST(Cli, DualizeChecksTheMean) {
  const auto j = parse_json(invoke({"dualize", "(a1 + a2)/2", "--check-mean", "--budget", "500"}).out);
  EXPECT_EQ(j["dual"], "root(2, a1 * a2)");
  EXPECT_EQ(j["check_mean"]["status"], "holds-on-sample");
}

TEST(Cli, StatsOnACsvFile) {
  TempFile f("stats.csv", "label,x\na,1\nb,2\n");
  const auto o = invoke({"stats", f.path(), "x", "--estimators", "bessel-plus,arith"});
  EXPECT_EQ(o.code, 0) << o.err;
  const auto j = parse_json(o.out);
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["estimates"][0]["value"], "3");
  EXPECT_FALSE(j["estimates"][0]["mean_like"].get<bool>());
  EXPECT_EQ(j["estimates"][1]["value"], "1.5");
  EXPECT_TRUE(j["estimates"][1]["mean_like"].get<bool>());
}

TEST(Cli, StatsBadCellExitsTwoWithTheRow) {
  TempFile f("bad.csv", "x\n1\noops\n");
  const auto o = invoke({"stats", f.path(), "x"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("row 3"), std::string::npos) << o.err;
}

TEST(Cli, BesselOnsetFromCsv) {
  TempFile f("seq.csv", "n\n1\n2\n3\n4\n5\n");
  const auto j = parse_json(invoke({"iterate", "bessel-onset", "--csv", f.path(), "--column", "n"}).out);
  EXPECT_EQ(j["onset"], 3);
}

TEST(Cli, OutFlagWritesTheFile) {
  TempFile f("out.txt", "");
  const auto o = invoke({"eval", "arith", "1", "3", "--out", f.path()});
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(f.path());
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "2\n");
}

TEST(Cli, ListIsValidJson) {
  const auto j = parse_json(invoke({"list"}).out);
  EXPECT_EQ(j["schema"], "quasimean/1");
  EXPECT_FALSE(j["entries"].empty());
  ASSERT_FALSE(j["standard_instances"].empty());
  EXPECT_EQ(j["standard_instances"][0]["id"], "arith");
  EXPECT_FALSE(j["standard_instances"][0]["claims"].empty());
}

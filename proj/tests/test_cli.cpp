#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("nugh_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunResult run(const std::string& args, const std::string& env = "") const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string command = env + " \"" + NUGH_CLI + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                                err.string() + "\"";
    const int status = std::system(command.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

std::vector<std::vector<double>> csvRows(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_F(Cli, CfGeoNIGAtOne) {
  const auto r = run("cf --family geo --lambda -0.5 --alpha 1 --beta 0 --delta 1 --mu 0 --t 1");
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = csvRows(r.out, &header);
  EXPECT_EQ(header, "t,re,im");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0][1], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(rows[0][2], 0.0);
  const auto closed = run("cf --family geo --t 1 --formula closed");
  EXPECT_EQ(csvRows(closed.out), rows);
}

TEST_F(Cli, CsvFormatting) {
  const auto r = run("cf --family cheb --beta 0.5 --alpha 2 --mu 0.3 --t-min -3 --t-max 3 --points 7");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, line.find(',')), "-3");
  EXPECT_EQ(csvRows(r.out).size(), 7u);
  const auto second = line.substr(line.find(',') + 1);
  const auto value = second.substr(0, second.find(','));
  EXPECT_EQ(std::stod(value), std::stod(value));
  EXPECT_GE(value.size(), 17u);
}

TEST_F(Cli, CheckChebyshevAllPassAndByteIdentical) {
  const auto a = run("check --family cheb --output a.json", "NUGH_OUTPUT_DIR=\"" + dir_.string() + "\"");
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run("check --family cheb --output b.json", "NUGH_OUTPUT_DIR=\"" + dir_.string() + "\"");
  ASSERT_EQ(b.code, 0) << b.err;
  const auto first = slurp(dir_ / "a.json");
  EXPECT_EQ(first, slurp(dir_ / "b.json"));
  EXPECT_NE(first.find("\"pass\": true"), std::string::npos);
  EXPECT_NE(first.find("\"failures\": 0"), std::string::npos);
  EXPECT_NE(first.find("\"version\""), std::string::npos);
  EXPECT_NE(first.find("\"config\""), std::string::npos);
}

TEST_F(Cli, PdfAliasFailureLeavesNoFile) {
  const auto target = dir_ / "pdf.csv";
  const auto r = run("pdf --family geo --x-min -0.05 --x-max 0.05 --points 1024 --output \"" + target.string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("AliasError"), std::string::npos);
  EXPECT_NE(r.err.find("inversion::pdfGrid"), std::string::npos);
  EXPECT_FALSE(fs::exists(target));
  EXPECT_FALSE(fs::exists(dir_ / "pdf.csv.partial"));
}

TEST_F(Cli, PdfAndCdfTables) {
  const auto pdf = run("pdf --family cheb --points 4096");
  ASSERT_EQ(pdf.code, 0) << pdf.err;
  const auto rows = csvRows(pdf.out);
  ASSERT_EQ(rows.size(), 4096u);
  double mass = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) mass += 0.5 * (rows[i][1] + rows[i - 1][1]) * (rows[i][0] - rows[i - 1][0]);
  EXPECT_NEAR(mass, 1.0, 1e-6);
  const auto cdf = run("cdf --family geo --x-min -2 --x-max 2 --points 5");
  ASSERT_EQ(cdf.code, 0) << cdf.err;
  const auto c = csvRows(cdf.out);
  ASSERT_EQ(c.size(), 5u);
  EXPECT_NEAR(c[2][1], 0.5, 1e-8);
  EXPECT_NEAR(c[0][1] + c[4][1], 1.0, 1e-8);
}

TEST_F(Cli, QuantileSymmetric) {
  const auto r = run("quantile --family cheb --q 0.5 --q 0.9");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csvRows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0][1], 0.0, 1e-6);
  EXPECT_GT(rows[1][1], 0.0);
}

TEST_F(Cli, SampleDeterministicBothRoutes) {
  const auto a = run("sample --family geo --n 500 --seed 9");
  const auto b = run("sample --family geo --n 500 --seed 9");
  const auto c = run("sample --family geo --n 500 --seed 9 --stream 1");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(csvRows(a.out).size(), 500u);
  const auto sum = run("sample --method random-sum --law laplace --family geo --p 0.1 --n 300");
  ASSERT_EQ(sum.code, 0) << sum.err;
  EXPECT_EQ(csvRows(sum.out).size(), 300u);
  const auto json = run("sample --n 3 --format json");
  ASSERT_EQ(json.code, 0);
  EXPECT_NE(json.out.find("\"x\""), std::string::npos);
}

TEST_F(Cli, TailsJson) {
  const auto r = run("tails --family geo");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"left\""), std::string::npos);
  EXPECT_NE(r.out.find("\"right\""), std::string::npos);
  EXPECT_NE(r.out.find("\"r2\""), std::string::npos);
}

TEST_F(Cli, FitFromSampledSeries) {
  ASSERT_EQ(run("sample --family geo --alpha 2 --beta 0.5 --n 400 --output series.csv",
                "NUGH_OUTPUT_DIR=\"" + dir_.string() + "\"").code, 0);
  const auto r = run("fit --family geo --starts 1 --input \"" + (dir_ / "series.csv").string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* key : {"\"family\"", "\"lambda\"", "\"alpha\"", "\"beta\"", "\"delta\"", "\"mu\"", "\"negLogLik\"",
                          "\"converged\"", "\"iterations\"", "\"seed\""})
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
}

TEST_F(Cli, ValidationErrors) {
  EXPECT_EQ(run("cf --family foo --t 1").code, 1);
  EXPECT_EQ(run("cf --alpha 1 --beta 2 --t 1").code, 1);
  EXPECT_EQ(run("cf --formula other --t 1").code, 1);
  EXPECT_EQ(run("pdf --points 1000").code, 1);
  EXPECT_EQ(run("quantile --q 1.5").code, 1);
  EXPECT_EQ(run("sample --method random-sum --family cheb --p 0.3").code, 1);
  EXPECT_EQ(run("check --format csv").code, 1);
  EXPECT_EQ(run("cf --no-such-flag").code, 1);
  EXPECT_EQ(run("").code, 1);
  const auto missing = run("fit --input \"" + (dir_ / "none.csv").string() + "\"");
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("fitting::ingestSeries"), std::string::npos);
  std::ofstream(dir_ / "bad.csv") << "0.1\nabc\n";
  const auto bad = run("fit --input \"" + (dir_ / "bad.csv").string() + "\"");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("row 2"), std::string::npos);
}

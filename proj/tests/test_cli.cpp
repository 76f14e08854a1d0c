// End-to-end tests of the command-line tool: scenario payload shapes, CSV and
// JSON rendering, unit conversion, determinism, and exit codes. The binary
// path is injected at build time via OIMAC_CLI_PATH.

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oimac/common.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(OIMAC_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : s) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

// RFC 4180-aware single-line field splitter.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;
};

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  bool have_header = false;
  for (const auto& line : split_lines(text)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      t.notes.push_back(line.substr(2));
      continue;
    }
    if (!have_header) {
      t.header = split_csv(line);
      have_header = true;
    } else {
      t.rows.push_back(split_csv(line));
    }
  }
  return t;
}

const std::vector<std::string>* find_row(const CsvTable& t, const std::string& label_col_value,
                                         std::size_t label_col) {
  for (const auto& row : t.rows)
    if (row.size() > label_col && row[label_col] == label_col_value) return &row;
  return nullptr;
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("pnr-star emits the threshold ratio as a bare number in both formats") {
  CliResult json = run_cli("pnr-star --format json");
  CliResult csv = run_cli("pnr-star");
  REQUIRE(json.exit_code == 0);
  REQUIRE(csv.exit_code == 0);
  CHECK(json.out == csv.out);
  CHECK(std::abs(num(json.out) - 4.1324346836039977) < 1e-5);
  CHECK(json.out.back() == '\n');

  CliResult tight = run_cli("pnr-star --tol 1e-9");
  REQUIRE(tight.exit_code == 0);
  CHECK(std::abs(num(tight.out) - 4.1324346836039977) < 1e-7);
}

TEST_CASE("identical invocations produce byte-identical output") {
  CliResult a = run_cli("avg-region --snr-db 10,5");
  CliResult b = run_cli("avg-region --snr-db 10,5");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);

  CliResult c = run_cli("peak-region --pnr-db 10,5 --format json");
  CliResult d = run_cli("peak-region --pnr-db 10,5 --format json");
  REQUIRE(c.exit_code == 0);
  CHECK(c.out == d.out);
}

TEST_CASE("avg-region CSV payload has pinned header and coherent corner rows") {
  CliResult r = run_cli("avg-region --snr-db 10,5");
  REQUIRE(r.exit_code == 0);
  CsvTable t = parse_csv(r.out);
  REQUIRE(t.header == std::vector<std::string>{"r1", "r2", "label", "units"});
  REQUIRE(t.rows.size() == 10);  // 5 outer pentagon corners + 5 inner corners
  for (const auto& row : t.rows) {
    REQUIRE(row.size() == 4);
    CHECK(row[3] == "nats");
    CHECK(num(row[0]) >= 0.0);
    CHECK(num(row[1]) >= 0.0);
  }

  // Outer pentagon: single-user bound 0.5*ln((e/2pi)(snr+2)^2) at snr=10.
  const auto* v1 = find_row(t, "outer:v1", 2);
  REQUIRE(v1 != nullptr);
  CHECK(std::abs(num((*v1)[0]) - 2.0659681165833276) < 1e-9);
  CHECK(std::abs(num((*v1)[1])) < 1e-12);

  // Inner decoding-order corners: both orders sum to the same sum rate.
  const auto* p12 = find_row(t, "inner:J={1,2}:perm(1,2)", 2);
  const auto* p21 = find_row(t, "inner:J={1,2}:perm(2,1)", 2);
  REQUIRE(p12 != nullptr);
  REQUIRE(p21 != nullptr);
  double sum12 = num((*p12)[0]) + num((*p12)[1]);
  double sum21 = num((*p21)[0]) + num((*p21)[1]);
  CHECK(std::abs(sum12 - sum21) < 1e-9);
  CHECK(std::abs(num((*p12)[0]) - 1.9719776045684967) < 5e-6);  // exponential-input rate, snr=10

  // Quoted labels round-trip through the RFC 4180 parser.
  CHECK(r.out.find("\"inner:J={1,2}:perm(1,2)\"") != std::string::npos);
}

TEST_CASE("JSON payload mirrors the CSV payload and round-trips") {
  CliResult csv = run_cli("avg-region --snr-db 10,5");
  CliResult json = run_cli("avg-region --snr-db 10,5 --format json");
  REQUIRE(csv.exit_code == 0);
  REQUIRE(json.exit_code == 0);

  CsvTable t = parse_csv(csv.out);
  nlohmann::json j = nlohmann::json::parse(json.out);
  REQUIRE(j["scenario"] == "avg-region");
  REQUIRE(j["units"] == "nats");
  REQUIRE(j["header"].size() == t.header.size());
  for (std::size_t i = 0; i < t.header.size(); ++i)
    CHECK(j["header"][i].get<std::string>() == t.header[i]);

  // Every cell re-parses to exactly the value the CSV carries: both formats
  // quantize to the same 12 significant digits.
  REQUIRE(j["rows"].size() == t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    REQUIRE(j["rows"][r].size() == t.rows[r].size());
    for (std::size_t i = 0; i < t.rows[r].size(); ++i) {
      const auto& cell = j["rows"][r][i];
      if (cell.is_string())
        CHECK(cell.get<std::string>() == t.rows[r][i]);
      else
        CHECK(cell.get<double>() == num(t.rows[r][i]));
    }
  }

  // Round trip: re-serializing the parsed document reproduces the payload.
  CHECK(nlohmann::json::parse(j.dump()) == j);
}

TEST_CASE("units=bits divides every rate column by ln 2 at write time") {
  CliResult nats = run_cli("type-compare --k 2 --snr-db 0");
  CliResult bits = run_cli("type-compare --k 2 --snr-db 0 --units bits");
  REQUIRE(nats.exit_code == 0);
  REQUIRE(bits.exit_code == 0);
  CsvTable tn = parse_csv(nats.out);
  CsvTable tb = parse_csv(bits.out);
  REQUIRE(tn.header == std::vector<std::string>{"x", "value", "lower", "upper", "method",
                                                "est_error"});
  REQUIRE(tn.rows.size() == 1);
  REQUIRE(tb.rows.size() == 1);
  // x (an SNR in dB) is not a rate; value/lower/upper/est_error are.
  CHECK(tn.rows[0][0] == tb.rows[0][0]);
  for (std::size_t col : {1u, 2u, 3u, 5u}) {
    double ratio = num(tn.rows[0][col]) / num(tb.rows[0][col]);
    CHECK(std::abs(ratio - oimac::kLn2) < 1e-9);
  }
  CHECK(std::abs(num(tn.rows[0][1]) - 0.17151273060133366517) < 2e-5);
  CHECK(std::abs(num(tn.rows[0][3]) - 0.67927602269784860203) < 2e-5);
}

TEST_CASE("avg-region at vanishing snr collapses the achievable corners to zero") {
  CliResult r = run_cli("avg-region --snr-db -100,-100");
  REQUIRE(r.exit_code == 0);
  CsvTable t = parse_csv(r.out);
  bool saw_inner = false;
  for (const auto& row : t.rows) {
    if (row[2].rfind("inner:", 0) == 0) {
      saw_inner = true;
      CHECK(std::abs(num(row[0])) < 1e-9);
      CHECK(std::abs(num(row[1])) < 1e-9);
    }
  }
  CHECK(saw_inner);
  // The closed-form outer bound does not vanish as snr -> 0.
  const auto* v1 = find_row(t, "outer:v1", 2);
  REQUIRE(v1 != nullptr);
  CHECK(std::abs(num((*v1)[0]) - 0.27420864735527256764) < 1e-6);
}

TEST_CASE("kuser-region emits one corner row per decoding order of each subset") {
  CliResult r = run_cli("kuser-region --k 3 --snr-db 10,10,10");
  REQUIRE(r.exit_code == 0);
  CsvTable t = parse_csv(r.out);
  REQUIRE(t.header == std::vector<std::string>{"r1", "r2", "r3", "label", "units"});
  // origin + 3 singleton + 3*2 pair + 6 triple corners
  REQUIRE(t.rows.size() == 16);
  int perm_rows = 0;
  double first_sum = -1.0;
  for (const auto& row : t.rows) {
    REQUIRE(row.size() == 5);
    if (row[3].rfind("inner:J={1,2,3}:perm", 0) == 0) {
      ++perm_rows;
      double s = num(row[0]) + num(row[1]) + num(row[2]);
      if (first_sum < 0)
        first_sum = s;
      else
        CHECK(std::abs(s - first_sum) < 1e-9);  // decoding orders share the sum rate
    }
  }
  CHECK(perm_rows == 6);
  const auto* p = find_row(t, "inner:J={1,2,3}:perm(1,2,3)", 3);
  REQUIRE(p != nullptr);
  CHECK(std::abs(num((*p)[0]) - 1.9719776045684967) < 5e-6);
}

TEST_CASE("kuser-region hrep forms emit outer and inner halfspaces together") {
  CliResult r = run_cli("kuser-region --k 2 --snr-db 10,5 --inner-form hrep");
  REQUIRE(r.exit_code == 0);
  CsvTable t = parse_csv(r.out);
  REQUIRE(t.header ==
          std::vector<std::string>{"coeff_r1", "coeff_r2", "bound", "label", "units"});
  REQUIRE(t.rows.size() == 6);  // 3 outer + 3 inner halfspaces
  const auto* o1 = find_row(t, "outer:J={1}", 3);
  REQUIRE(o1 != nullptr);
  CHECK(num((*o1)[0]) == 1.0);
  CHECK(num((*o1)[1]) == 0.0);
  CHECK(std::abs(num((*o1)[2]) - 2.0659681165833276) < 1e-9);
  const auto* i1 = find_row(t, "inner:J={1}", 3);
  REQUIRE(i1 != nullptr);
  // Closed-form inner: 0.5*ln(1 + (e/2pi) snr^2) at snr=10; the CSV carries
  // 12 significant digits, so parse-back agreement stops around 1e-11.
  CHECK(std::abs(num((*i1)[2]) - 0.5 * std::log(1.0 + oimac::kEOver2Pi * 100.0)) < 1e-10);
}

TEST_CASE("single-user-peak sweeps the grid with sandwiched capacity estimates") {
  CliResult r = run_cli("single-user-peak --grid 0:6:3");
  REQUIRE(r.exit_code == 0);
  CsvTable t = parse_csv(r.out);
  REQUIRE(t.rows.size() == 3);
  double prev_x = -1e300;
  for (const auto& row : t.rows) {
    double x = num(row[0]);
    CHECK(x > prev_x);
    prev_x = x;
    double value = num(row[1]), lower = num(row[2]), upper = num(row[3]);
    CHECK(row[4] == "ba-grid");
    CHECK(value >= lower - 1e-3);
    CHECK(value <= upper + 1e-6);
    CHECK(num(row[5]) <= 1e-4 * 1.0001);
  }
  CHECK(num(t.rows[0][0]) == 0.0);
  CHECK(num(t.rows[2][0]) == 6.0);
}

TEST_CASE("lemma5-dist lists the discrete maximizer and its achieved rate") {
  CliResult r = run_cli("lemma5-dist --grid 4.7:0:1");
  REQUIRE(r.exit_code == 0);
  CsvTable t = parse_csv(r.out);
  REQUIRE(t.rows.size() >= 4);
  double mass = 0.0;
  int atoms = 0;
  for (const auto& row : t.rows) {
    if (row[4] == "maxmass-atom") {
      ++atoms;
      mass += num(row[1]);
    }
  }
  CHECK(atoms == 10);  // ceil(4.7) + 1 = 6 levels, symmetric support has 10 distinct points
  CHECK(std::abs(mass - 1.0) < 1e-12);
  const auto& cap_row = t.rows[t.rows.size() - 2];
  const auto& ach_row = t.rows[t.rows.size() - 1];
  REQUIRE(cap_row[4] == "closed-form-capacity");
  CHECK(std::abs(num(cap_row[1]) - 1.7370630021898686129) < 1e-9);
  CHECK(ach_row[4].rfind("achieved-rate:", 0) == 0);
  CHECK(std::abs(num(ach_row[1]) - num(cap_row[1])) < 1e-6);
}

TEST_CASE("joint-outer emits six labeled halfspaces for the preset constraint mix") {
  CliResult r = run_cli("joint-outer");
  REQUIRE(r.exit_code == 0);
  CsvTable t = parse_csv(r.out);
  REQUIRE(t.header ==
          std::vector<std::string>{"coeff_r1", "coeff_r2", "bound", "label", "units"});
  REQUIRE(t.rows.size() == 6);
  // Average-power family at snr_i = pnr_i / 5 with pnr = (10, 10^0.5).
  const auto* a1 = find_row(t, "avg:J={1}", 3);
  REQUIRE(a1 != nullptr);
  CHECK(std::abs(num((*a1)[2]) - 0.96735582791521787705) < 1e-9);  // snr = 2
  const auto* p1 = find_row(t, "peak:J={1}", 3);
  REQUIRE(p1 != nullptr);
  CHECK(std::abs(num((*p1)[2]) - 1.2295549465893361187) < 1e-9);  // pnr = 10
  const auto* ps = find_row(t, "peak:J={1,2}", 3);
  REQUIRE(ps != nullptr);
  CHECK(num((*ps)[0]) == 1.0);
  CHECK(num((*ps)[1]) == 1.0);
}

TEST_CASE("--out writes exactly the bytes that stdout would have carried") {
  std::string path = "/tmp/oimac_cli_out_test.csv";
  std::remove(path.c_str());
  CliResult direct = run_cli("joint-outer --units bits");
  CliResult filed = run_cli("joint-outer --units bits --out " + path);
  REQUIRE(direct.exit_code == 0);
  REQUIRE(filed.exit_code == 0);
  CHECK(filed.out.empty());
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == direct.out);
  std::remove(path.c_str());
}

TEST_CASE("usage problems exit with code 2 and numerical domains with code 1") {
  CHECK(run_cli("no-such-scenario").exit_code == 2);
  CHECK(run_cli("avg-region --snr-db 1,2,3").exit_code == 2);  // two-user scenario
  CHECK(run_cli("avg-region --snr-db abc").exit_code == 2);
  CHECK(run_cli("avg-region --snr-db 10,5 --units furlongs").exit_code == 2);
  CHECK(run_cli("avg-region --snr-db 10,5 --format xml").exit_code == 2);
  CHECK(run_cli("peak-region --inner-form ie-hrep").exit_code == 2);
  CHECK(run_cli("single-user-peak --grid 1:2").exit_code == 2);
  CHECK(run_cli("single-user-peak --grid 1:2:0").exit_code == 2);
  CHECK(run_cli("kuser-region --k 7").exit_code == 2);
  CHECK(run_cli("avg-region --snr-db 10,5 --bogus-flag").exit_code == 2);
  CHECK(run_cli("avg-region --snr-db 10,5 --refined-outer").exit_code == 2);
  CHECK(run_cli("lemma5-dist --grid -1:0:1").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("gap-vs-k shrinks the sum-rate gap as users join") {
  CliResult r = run_cli("gap-vs-k --k 3 --snr-db 10");
  REQUIRE(r.exit_code == 0);
  CsvTable t = parse_csv(r.out);
  REQUIRE(t.rows.size() == 3);
  double prev = 1e300;
  for (const auto& row : t.rows) {
    double gap = num(row[1]);
    CHECK(gap > 0.0);
    CHECK(gap < prev);
    prev = gap;
    CHECK(num(row[3]) >= num(row[2]));  // outer bound at least the inner rate
  }
}

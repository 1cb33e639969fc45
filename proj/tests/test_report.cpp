#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fkdet/report.hpp"

using namespace fkdet;

namespace {

std::vector<ReportRecord> sample_records() {
  ReportRecord a;
  a.scheme = "jensen";
  a.size = 10;
  a.log_estimate = 0.16257870401522231;
  a.note = "value of record";
  ReportRecord b;
  b.scheme = "quotient";
  b.size = 8;
  b.minus_inf = true;
  b.certificate = "neumann";
  b.note = "has \"quotes\", commas,\nand a newline";
  ReportRecord c;
  c.scheme = "folner";
  c.size = 64;
  c.log_estimate = 1.3907905171344743;
  c.excluded = 3;
  return {a, b, c};
}

}  // namespace

TEST_CASE("json round trip reproduces records byte for byte", "[report]") {
  const std::vector<ReportRecord> records = sample_records();
  std::ostringstream first;
  emit_json(records, first);

  std::istringstream in(first.str());
  const std::vector<ReportRecord> back = ingest_json(in);
  REQUIRE(back == records);

  std::ostringstream second;
  emit_json(back, second);
  CHECK(second.str() == first.str());
}

TEST_CASE("csv output follows RFC 4180", "[report]") {
  std::ostringstream os;
  emit_csv(sample_records(), os);
  const std::string text = os.str();
  CHECK(text.rfind("scheme,size,log_estimate,certificate,wall_ms,excluded,note\r\n", 0) == 0);
  CHECK(text.find("-inf") != std::string::npos);
  CHECK(text.find("\"has \"\"quotes\"\", commas,\nand a newline\"") != std::string::npos);

  std::ostringstream empty;
  emit_csv({}, empty);
  CHECK(empty.str() == "scheme,size,log_estimate,certificate,wall_ms,excluded,note\r\n");
}

TEST_CASE("svg output is a standalone chart", "[report]") {
  std::ostringstream os;
  emit_svg(sample_records(), os);
  const std::string text = os.str();
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(text.find("<polyline") != std::string::npos);
  CHECK(text.find("jensen") != std::string::npos);   // legend
  CHECK(text.find("quotient") != std::string::npos); // legend even without points
  CHECK(text.find("http://") != std::string::npos);  // only the xmlns, no assets
  CHECK(text.find("href") == std::string::npos);
}

TEST_CASE("ingest rejects malformed reports", "[report]") {
  std::istringstream bad1("{\"scheme\": 1}");
  CHECK_THROWS_AS(ingest_json(bad1), io_error);
  std::istringstream bad2("[{\"scheme\":\"x\"}]");
  CHECK_THROWS_AS(ingest_json(bad2), io_error);
  std::istringstream bad3("not json");
  CHECK_THROWS_AS(ingest_json(bad3), io_error);
}

TEST_CASE("double formatting survives the round trip", "[report]") {
  for (double v : {0.1, 1.0 / 3.0, 6.02e23, -2.5e-17, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

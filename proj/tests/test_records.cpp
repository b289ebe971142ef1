#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "acoustic/records.hpp"

using namespace acoustic;

TEST_SUITE("records") {
  TEST_CASE("window record parsing") {
    std::stringstream in(
        R"({"node_id":"7","ts":"2016-07-16T14:05:00Z","bins":[1,3,2,2,2],"complete":false})"
        "\n");
    const auto result = io::read_windows(in);
    CHECK(result.issues.empty());
    REQUIRE(result.windows.size() == 1);
    const auto& w = result.windows[0];
    CHECK(w.node_id == "7");
    CHECK(timeutil::format_iso8601(w.window_start) == "2016-07-16T14:05:00Z");
    CHECK(w.histogram.bins == std::array<std::int64_t, 5>{1, 3, 2, 2, 2});
    CHECK_FALSE(w.complete);
  }

  TEST_CASE("empty stream yields nothing and no issues") {
    std::stringstream in("");
    const auto result = io::read_windows(in);
    CHECK(result.windows.empty());
    CHECK(result.issues.empty());
  }

  TEST_CASE("schema violations carry line numbers") {
    std::stringstream in(
        R"({"node_id":"7","ts":"2016-07-16T14:05:00Z","bins":[1,3,2,2,2],"complete":true})"
        "\n"
        R"({"node_id":"7","ts":"2016-07-16T14:10:00Z","bins":[1,3,2,2],"complete":true})"
        "\n"
        "not json\n"
        R"({"node_id":"7","ts":"2016-07-16T99:10:00Z","bins":[1,3,2,2,2],"complete":true})"
        "\n");
    const auto result = io::read_windows(in);
    CHECK(result.windows.size() == 1);
    REQUIRE(result.issues.size() == 3);
    CHECK(result.issues[0].line == 2);
    CHECK(result.issues[0].message.find("5 bins") != std::string::npos);
    CHECK(result.issues[1].line == 3);
    CHECK(result.issues[2].line == 4);

    std::stringstream again(in.str());
    CHECK_THROWS_AS(io::read_windows(again, /*strict=*/true), std::runtime_error);
  }

  TEST_CASE("window write/read round-trip is identity") {
    std::vector<histo::SensorWindow> windows;
    histo::SensorWindow w;
    w.node_id = "n3";
    w.window_start = *timeutil::parse_iso8601("2025-01-06T00:05:00Z");
    w.histogram.bins = {2990, 4, 3, 2, 1};
    w.complete = true;
    windows.push_back(w);
    w.node_id = "n10";
    w.window_start = *timeutil::parse_iso8601("2025-01-07T23:55:00Z");
    w.histogram.bins = {0, 0, 0, 0, 1500};
    w.complete = false;
    windows.push_back(w);

    std::stringstream buffer;
    io::write_windows(buffer, windows);
    const auto back = io::read_windows(buffer);
    CHECK(back.issues.empty());
    REQUIRE(back.windows.size() == windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
      CHECK(back.windows[i].node_id == windows[i].node_id);
      CHECK(back.windows[i].window_start == windows[i].window_start);
      CHECK(back.windows[i].histogram.bins == windows[i].histogram.bins);
      CHECK(back.windows[i].complete == windows[i].complete);
    }
  }

  TEST_CASE("result records round-trip") {
    std::vector<io::ResultRecord> records{
        {"2025-01-06T10:00:00Z", "n1", "AP", 3.25, 1, 0},
        {"2025-01-06T10:05:00Z", "n1", "RP", 0.125, 0, 1},
    };
    std::stringstream buffer;
    io::write_results(buffer, records);
    const auto back = io::read_results(buffer);
    CHECK(back.issues.empty());
    REQUIRE(back.records.size() == 2);
    CHECK(back.records[0].ts == records[0].ts);
    CHECK(back.records[0].chi2 == records[0].chi2);
    CHECK(back.records[0].active == 1);
    CHECK(back.records[1].suppressed_by_rain == 1);
    CHECK(back.records[1].period == "RP");
  }

  TEST_CASE("rain and qq CSV layouts") {
    std::stringstream rain;
    io::write_rain_csv(rain, std::vector<detect::RainInterval>{
                                 {*timeutil::parse_iso8601("2025-01-06T10:00:00Z"),
                                  *timeutil::parse_iso8601("2025-01-06T10:45:00Z"), 6}});
    CHECK(rain.str() ==
          "start,end,nodes\n2025-01-06T10:00:00Z,2025-01-06T10:45:00Z,6\n");

    std::stringstream qq;
    io::write_qq_csv(qq, std::vector<io::QqRow>{{"n1", "2025-01-06", "NP", 0.5, 0.75}});
    CHECK(qq.str() == "node_id,date,period,theoretical,empirical\nn1,2025-01-06,NP,0.5,0.75\n");
  }

  TEST_CASE("raw CSV parsing collects line-numbered issues") {
    std::stringstream in(
        "ts,node_id,value\n"
        "2025-01-06T00:00:00Z,n1,4\n"
        "2025-01-06T00:00:00.100Z,n1,7\n"
        "2025-01-06T00:00:00.200Z,n1,snap\n"
        "2025-01-06T00:00:00.300Z,n1,2000\n"
        "oops\n"
        "2025-01-06T00:00:00.400Z,n2,9\n");
    const auto result = io::read_raw_csv(in);
    REQUIRE(result.per_node.size() == 2);
    CHECK(result.per_node[0].first == "n1");
    CHECK(result.per_node[0].second.size() == 2);
    CHECK(result.per_node[1].first == "n2");
    REQUIRE(result.issues.size() == 3);
    CHECK(result.issues[0].line == 4);
    CHECK(result.issues[1].line == 5);
    CHECK(result.issues[2].line == 6);
  }

  TEST_CASE("atomic write replaces content and leaves no temp file") {
    const auto dir = std::filesystem::temp_directory_path() / "acoustic_records_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    io::atomic_write(path, [](std::ostream& os) { os << "first\n"; });
    io::atomic_write(path, [](std::ostream& os) { os << "second\n"; });
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "second\n");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("format_double round-trips shortest decimals") {
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(3.0) == "3");
    CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
  }
}

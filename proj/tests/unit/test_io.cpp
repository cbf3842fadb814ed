#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include "doctest.h"
#include "wavefront/error.hpp"
#include "wavefront/io.hpp"

using namespace wavefront;
using io::json;

namespace {

const std::filesystem::path kData = WAVEFRONT_TEST_DATA;

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("model files load into the matching family") {
  struct Case {
    const char* file;
    const char* family;
  };
  for (const Case& c : {Case{"local_noncritical.json", "local_delayed_rd"}, Case{"kpp_gaussian.json", "nonlocal_kpp"},
                        Case{"lattice.json", "nonlocal_lattice"}, Case{"nonlocal_delayed.json", "nonlocal_delayed_rd"}}) {
    const auto m = io::load_model(kData / "models" / c.file);
    CHECK(m.family_name() == c.family);
    REQUIRE(m.c);
  }
  const auto m = io::load_model(kData / "models" / "local_noncritical.json");
  CHECK(*m.c == 2.5);
  CHECK(m.bound == 1.0);
  const auto sd = to_convolution_form(m, *m.c).analyze();
  CHECK(sd.lambda_l == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("kernel and nonlinearity specs match the constructors") {
  const auto k = io::kernel_from_json(json::parse(R"({"kind": "gaussian", "variance": 2.0, "mean": 1.0})"), "k");
  const auto ref = KernelComponent::gaussian(2.0, 1.0);
  for (double z : {-0.5, 0.0, 0.7}) CHECK(std::abs(k.laplace(z) - ref.laplace(z)) < 1e-14);
  const auto conv = io::kernel_from_json(
      json::parse(R"({"kind": "convolved", "first": {"kind": "dirac_comb", "offsets": [1.0], "weights": [1.0]},
                      "second": {"kind": "exponential", "rate": 2.0, "direction": "right"}})"),
      "k");
  CHECK(std::abs(conv.laplace(0.5) - std::exp(-0.5) * 2.0 / 2.5) < 1e-12);
  const auto g = io::nonlinearity_from_json(json::parse(R"({"kind": "mackey_glass", "p": 2, "n": 8})"), "g");
  CHECK(g(1.0) == doctest::Approx(1.0));
  CHECK(g.gprime0() == doctest::Approx(2.0));
}

TEST_CASE("schema errors carry the offending path") {
  auto bad = [](const char* text) {
    return [text] { io::model_from_json(json::parse(text)); };
  };
  CHECK(code_of(bad(R"({"family": "nope"})")) == ErrorCode::Schema);
  CHECK(code_of(bad(R"({"family": "local_delayed_rd", "L": 2, "h": 0})")) == ErrorCode::Schema);
  const auto msg = message_of(bad(R"({"family": "local_delayed_rd", "L": 2, "h": 0, "g": {"kind": "logistic"}})"));
  CHECK(msg.find("model.g.rate") != std::string::npos);
  CHECK(code_of(bad(R"({"family": "nonlocal_kpp", "J": {"kind": "gaussian", "variance": "x"},
                        "g": {"kind": "linear", "slope": 2}})")) == ErrorCode::Schema);
  CHECK(code_of([] { io::load_model(kData / "models" / "malformed.json"); }) == ErrorCode::Schema);
  CHECK(code_of([] { io::load_model(kData / "models" / "missing.json"); }) == ErrorCode::Io);
}

TEST_CASE("deterministic number formatting") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(io::format_double(M_PI)) == M_PI);
  const json j = {{"b", 1.5}, {"a", INFINITY}, {"c", {1, 2}}, {"d", -INFINITY}};
  const std::string s = io::dump(j, 0);
  CHECK(s == io::dump(j, 0));
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("\"inf\"") != std::string::npos);
  CHECK(s.find("\"-inf\"") != std::string::npos);
  CHECK(json::parse(s)["b"].get<double>() == 1.5);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(io::fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("profile CSV round trip") {
  WaveProfile p;
  p.grid = Grid::make(-1, 1, 64);
  for (int i = 0; i < 64; ++i) p.values.push_back(std::exp(p.t(i)));
  const auto path = std::filesystem::temp_directory_path() / "wavefront_io_test" / "profile.csv";
  io::write_profile_csv(path, p);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,phi");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double t = std::stod(line.substr(0, comma)), v = std::stod(line.substr(comma + 1));
    CHECK(t == p.t(rows));
    CHECK(v == p.values[rows]);
    ++rows;
  }
  CHECK(rows == 64);
  std::filesystem::remove_all(path.parent_path());
}

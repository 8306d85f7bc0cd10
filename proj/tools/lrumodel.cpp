// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: runs the analytical model, the simulator, or both on
// a loop-nest file and prints miss reports or scaling benchmarks.

#include "lrumodel/frontend/Parser.h"
#include "lrumodel/model/Model.h"
#include "lrumodel/poly/Parse.h"
#include "lrumodel/sim/Simulator.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

using namespace lrumodel;
using model::MissReport;
using nlohmann::ordered_json;
using poly::BigInt;
using poly::Int;

namespace {

enum ExitCode { Ok = 0, Differences = 1, InputError = 2, InternalError = 3 };

struct Options {
  std::string Input;
  Int LineSize = 64;
  std::vector<std::string> Caches;
  std::string Mode = "model";
  std::string Format = "table";
  model::ModelOptions Model;
  std::string TracePath;
  std::vector<Int> BenchScales;
  std::vector<std::string> Params;
  bool Distances = false;
};

/// Invalid command-line input, reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Int parseBytes(const std::string &Text) {
  size_t Pos = 0;
  long long Value = 0;
  try {
    Value = std::stoll(Text, &Pos);
  } catch (const std::exception &) {
    throw UsageError("invalid cache size '" + Text + "'");
  }
  std::string Suffix = Text.substr(Pos);
  for (char &C : Suffix)
    C = static_cast<char>(std::toupper(static_cast<unsigned char>(C)));
  Int Scale = 1;
  if (Suffix == "K" || Suffix == "KB" || Suffix == "KIB")
    Scale = 1024;
  else if (Suffix == "M" || Suffix == "MB" || Suffix == "MIB")
    Scale = 1024 * 1024;
  else if (Suffix == "G" || Suffix == "GB" || Suffix == "GIB")
    Scale = 1024 * 1024 * 1024;
  else if (!Suffix.empty() && Suffix != "B")
    throw UsageError("invalid cache size suffix in '" + Text + "'");
  return poly::checkedMul(static_cast<Int>(Value), Scale);
}

std::map<std::string, Int> parseParams(const std::vector<std::string> &Params) {
  std::map<std::string, Int> Out;
  for (const std::string &P : Params) {
    size_t Eq = P.find('=');
    if (Eq == std::string::npos || Eq == 0)
      throw UsageError("expected NAME=VALUE, got '" + P + "'");
    try {
      Out[P.substr(0, Eq)] = std::stoll(P.substr(Eq + 1));
    } catch (const std::exception &) {
      throw UsageError("invalid value in '" + P + "'");
    }
  }
  return Out;
}

double secondsSince(std::chrono::steady_clock::time_point Start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - Start).count();
}

/// Integers that fit are JSON numbers; larger ones are decimal strings.
ordered_json toJson(const BigInt &V) {
  if (V.fits_slong_p())
    return V.get_si();
  return V.get_str();
}

ordered_json reportJson(const MissReport &R, bool WithStats) {
  ordered_json J;
  J["statements"] = ordered_json::array();
  for (const model::StatementMisses &S : R.Statements) {
    ordered_json Capacity = ordered_json::array();
    for (const BigInt &C : S.Capacity)
      Capacity.push_back(toJson(C));
    J["statements"].push_back(
        {{"label", S.Label}, {"accesses", toJson(S.Accesses)}, {"compulsory", toJson(S.Compulsory)},
         {"capacity", Capacity}});
  }
  ordered_json Capacity = ordered_json::array(), Hits = ordered_json::array();
  for (size_t L = 0; L < R.Config.numLevels(); ++L) {
    Capacity.push_back(toJson(R.totalCapacity(L)));
    Hits.push_back(toJson(R.hits(L)));
  }
  J["totals"] = {{"accesses", toJson(R.totalAccesses())},
                 {"compulsory", toJson(R.totalCompulsory())},
                 {"capacity", Capacity},
                 {"hits", Hits}};
  if (WithStats) {
    const model::PhaseTimes &T = R.Stats.Times;
    J["stats"] = {{"pieces", R.Stats.Pieces},
                  {"non_affine_pieces", R.Stats.NonAffinePieces},
                  {"enumerated_points", R.Stats.EnumeratedPoints},
                  {"counting_fallbacks", R.Stats.CountingFallbacks},
                  {"seconds",
                   {{"distances", T.Distances},
                    {"compulsory", T.Compulsory},
                    {"rewrites", T.Rewrites},
                    {"enumeration", T.Enumeration},
                    {"counting", T.Counting},
                    {"total", T.total()}}}};
  }
  return J;
}

ordered_json configJson(const model::CacheConfig &C) {
  return {{"line_size", C.LineSize}, {"capacities", C.Capacities}};
}

ordered_json distancesJson(const frontend::Program &P, const model::DistanceSet &D) {
  ordered_json Out = ordered_json::array();
  for (const model::DistanceEntry &E : D.Entries)
    for (const poly::Piece &Pc : E.Pieces)
      Out.push_back({{"statement", P.Statements[E.Statement].Label},
                     {"access", E.Access},
                     {"domain", Pc.Domain.str()},
                     {"distance", Pc.Poly.str(P.Statements[E.Statement].Iterators)}});
  return Out;
}

std::string levelName(const model::CacheConfig &C, size_t L) {
  Int Bytes = C.Capacities[L];
  std::string Size = Bytes % (1024 * 1024) == 0 ? std::to_string(Bytes / (1024 * 1024)) + "MiB"
                     : Bytes % 1024 == 0      ? std::to_string(Bytes / 1024) + "KiB"
                                              : std::to_string(Bytes) + "B";
  return "L" + std::to_string(L + 1) + " " + Size;
}

void printTable(std::ostream &OS, const std::vector<std::string> &Header,
                const std::vector<std::vector<std::string>> &Rows) {
  std::vector<size_t> Width(Header.size());
  for (size_t C = 0; C < Header.size(); ++C) {
    Width[C] = Header[C].size();
    for (const auto &R : Rows)
      Width[C] = std::max(Width[C], R[C].size());
  }
  auto Line = [&](const std::vector<std::string> &R) {
    for (size_t C = 0; C < R.size(); ++C)
      OS << (C ? "  " : "") << (C ? std::right : std::left) << std::setw(static_cast<int>(Width[C])) << R[C];
    OS << '\n';
  };
  Line(Header);
  for (const auto &R : Rows)
    Line(R);
}

std::vector<std::string> reportHeader(const model::CacheConfig &C, bool Csv) {
  std::vector<std::string> H{"statement", "accesses", "compulsory"};
  for (size_t L = 0; L < C.numLevels(); ++L)
    H.push_back(Csv ? "capacity@L" + std::to_string(L + 1) : "capacity " + levelName(C, L));
  return H;
}

std::vector<std::vector<std::string>> reportRows(const MissReport &R) {
  std::vector<std::vector<std::string>> Rows;
  for (const model::StatementMisses &S : R.Statements) {
    std::vector<std::string> Row{S.Label, S.Accesses.get_str(), S.Compulsory.get_str()};
    for (const BigInt &C : S.Capacity)
      Row.push_back(C.get_str());
    Rows.push_back(std::move(Row));
  }
  std::vector<std::string> Total{"total", R.totalAccesses().get_str(), R.totalCompulsory().get_str()};
  for (size_t L = 0; L < R.Config.numLevels(); ++L)
    Total.push_back(R.totalCapacity(L).get_str());
  Rows.push_back(std::move(Total));
  return Rows;
}

void printCsv(std::ostream &OS, const std::vector<std::string> &Header,
              const std::vector<std::vector<std::string>> &Rows, const std::string &Prefix = {}) {
  auto Line = [&](const std::vector<std::string> &R) {
    for (size_t C = 0; C < R.size(); ++C)
      OS << (C ? "," : "") << R[C];
    OS << '\n';
  };
  if (Prefix.empty()) {
    Line(Header);
    for (const auto &R : Rows)
      Line(R);
    return;
  }
  for (const auto &R : Rows) {
    std::vector<std::string> Row{Prefix};
    Row.insert(Row.end(), R.begin(), R.end());
    Line(Row);
  }
}

std::string statsLine(const MissReport &R) {
  std::ostringstream OS;
  OS << "pieces " << R.Stats.Pieces << ", non-affine " << R.Stats.NonAffinePieces << ", enumerated points "
     << R.Stats.EnumeratedPoints << ", counting fallbacks " << R.Stats.CountingFallbacks << ", model time "
     << std::setprecision(3) << R.Stats.Times.total() << " s";
  return OS.str();
}

frontend::Program load(const Options &O, const std::map<std::string, Int> &Params) {
  std::ifstream In(O.Input);
  if (!In)
    throw UsageError("cannot read '" + O.Input + "'");
  std::stringstream SS;
  SS << In.rdbuf();
  return frontend::lower(frontend::parseProgram(SS.str(), Params), O.LineSize);
}

model::CacheConfig cacheConfig(const Options &O) {
  model::CacheConfig C{O.LineSize, {}};
  for (const std::string &S : O.Caches)
    C.Capacities.push_back(parseBytes(S));
  if (C.Capacities.empty())
    C.Capacities = {32 * 1024, 1024 * 1024};
  C.validate();
  return C;
}

int run(const Options &O) {
  model::CacheConfig Config = cacheConfig(O);
  frontend::Program P = load(O, parseParams(O.Params));

  std::optional<MissReport> Model, Simulated;
  model::DistanceSet Distances;
  std::optional<sim::MemoryTrace> Trace;
  double SimSeconds = 0;
  if (O.Mode == "model" || O.Mode == "verify")
    Model = model::analyze(P, Config, O.Model, &Distances);
  if (O.Mode == "simulate" || O.Mode == "verify" || !O.TracePath.empty()) {
    auto Start = std::chrono::steady_clock::now();
    Trace = sim::generateTrace(P);
    sim::SimulationResult R = sim::simulate(*Trace, Config);
    SimSeconds = secondsSince(Start);
    if (!O.TracePath.empty()) {
      std::ofstream Out(O.TracePath);
      if (!Out)
        throw UsageError("cannot write '" + O.TracePath + "'");
      sim::writeTraceCsv(Out, *Trace, R);
    }
    if (O.Mode != "model")
      Simulated = std::move(R.Report);
  }
  std::vector<model::Difference> Diffs;
  if (Model && Simulated)
    Diffs = model::compare(*Simulated, *Model);

  std::ostream &OS = std::cout;
  if (O.Format == "json") {
    ordered_json J{{"input", O.Input}, {"mode", O.Mode}, {"config", configJson(Config)}};
    if (Model) {
      J["model"] = reportJson(*Model, true);
      if (O.Distances)
        J["model"]["distances"] = distancesJson(P, Distances);
    }
    if (Simulated) {
      J["simulator"] = reportJson(*Simulated, false);
      J["simulator"]["seconds"] = SimSeconds;
    }
    if (Model && Simulated) {
      J["differences"] = ordered_json::array();
      for (const model::Difference &D : Diffs)
        J["differences"].push_back({{"statement", D.Statement},
                                    {"quantity", D.Quantity},
                                    {"simulator", toJson(D.Expected)},
                                    {"model", toJson(D.Actual)}});
    }
    OS << J.dump(2) << '\n';
  } else if (O.Format == "csv") {
    std::vector<std::string> Header = reportHeader(Config, true);
    Header.insert(Header.begin(), "source");
    printCsv(OS, Header, {});
    if (Model)
      printCsv(OS, Header, reportRows(*Model), "model");
    if (Simulated)
      printCsv(OS, Header, reportRows(*Simulated), "simulator");
  } else {
    if (Model) {
      OS << "model\n";
      printTable(OS, reportHeader(Config, false), reportRows(*Model));
      OS << statsLine(*Model) << "\n";
      if (O.Distances) {
        OS << "\nstack distances\n";
        for (const model::DistanceEntry &E : Distances.Entries)
          for (const poly::Piece &Pc : E.Pieces)
            OS << "  " << P.Statements[E.Statement].Label << " access " << E.Access << ": "
               << Pc.Poly.str(P.Statements[E.Statement].Iterators) << "  on  " << Pc.Domain.str() << "\n";
      }
    }
    if (Simulated) {
      OS << (Model ? "\n" : "") << "simulator\n";
      printTable(OS, reportHeader(Config, false), reportRows(*Simulated));
      OS << "simulated " << Trace->Records.size() << " accesses in " << std::setprecision(3) << SimSeconds
         << " s\n";
    }
    if (Model && Simulated) {
      OS << "\n" << (Diffs.empty() ? "verify: model matches simulator\n" : "verify: differences\n");
      for (const model::Difference &D : Diffs)
        OS << "  " << D.Statement << " " << D.Quantity << ": model " << D.Actual << ", simulator " << D.Expected
           << "\n";
    }
  }
  return Diffs.empty() ? Ok : Differences;
}

int bench(const Options &O) {
  model::CacheConfig Config = cacheConfig(O);
  std::map<std::string, Int> Params = parseParams(O.Params);
  std::vector<std::string> Header{"scale", "accesses", "pieces", "model_seconds", "simulator_seconds", "match"};
  std::vector<std::vector<std::string>> Rows;
  ordered_json J = ordered_json::array();
  for (Int Scale : O.BenchScales) {
    Params["N"] = Scale;
    frontend::Program P = load(O, Params);
    auto Start = std::chrono::steady_clock::now();
    MissReport M = model::analyze(P, Config, O.Model);
    double ModelSeconds = secondsSince(Start);
    Start = std::chrono::steady_clock::now();
    MissReport S = sim::simulate(sim::generateTrace(P), Config).Report;
    double SimSeconds = secondsSince(Start);
    bool Match = model::compare(S, M).empty();
    std::ostringstream MS, SS;
    MS << std::setprecision(4) << ModelSeconds;
    SS << std::setprecision(4) << SimSeconds;
    Rows.push_back({std::to_string(Scale), M.totalAccesses().get_str(), std::to_string(M.Stats.Pieces), MS.str(),
                    SS.str(), Match ? "yes" : "no"});
    J.push_back({{"scale", Scale},
                 {"accesses", toJson(M.totalAccesses())},
                 {"pieces", M.Stats.Pieces},
                 {"model_seconds", ModelSeconds},
                 {"simulator_seconds", SimSeconds},
                 {"match", Match}});
    if (!Match)
      std::cerr << "scale " << Scale << ": model and simulator disagree\n";
  }
  if (O.Format == "json")
    std::cout << J.dump(2) << '\n';
  else if (O.Format == "csv")
    printCsv(std::cout, Header, Rows);
  else
    printTable(std::cout, Header, Rows);
  return std::all_of(Rows.begin(), Rows.end(), [](const auto &R) { return R.back() == "yes"; }) ? Ok : Differences;
}

} // namespace

int main(int Argc, char **Argv) {
  CLI::App App{"Exact compulsory and capacity misses of affine loop nests on fully associative LRU caches."};
  Options O;
  App.add_option("input", O.Input, "Loop-nest file")->required();
  App.add_option("--line-size", O.LineSize, "Cache line size in bytes")->capture_default_str();
  App.add_option("--cache", O.Caches, "Capacity of one cache level, innermost first (K/M suffixes); "
                                      "default 32K and 1M")
      ->allow_extra_args(false);
  App.add_option("--mode", O.Mode, "model, simulate or verify")
      ->check(CLI::IsMember({"model", "simulate", "verify"}))
      ->capture_default_str();
  App.add_option("--format", O.Format, "table, json or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  bool NoEqualization = false, NoRasterization = false, NoPartialEnumeration = false;
  App.add_flag("--no-equalization", NoEqualization, "Disable the equalization rewrite");
  App.add_flag("--no-rasterization", NoRasterization, "Disable the rasterization rewrite");
  App.add_flag("--no-partial-enumeration", NoPartialEnumeration,
               "Enumerate non-affine pieces completely instead of partially");
  App.add_option("--dump-trace", O.TracePath, "Write the simulated trace as CSV to this file");
  App.add_option("--bench-scales", O.BenchScales, "Benchmark model and simulator with parameter N at each scale")
      ->delimiter(',');
  App.add_option("--param", O.Params, "Override a parameter, NAME=VALUE")->allow_extra_args(false);
  App.add_flag("--distances", O.Distances, "Also print the stack distance pieces");

  try {
    App.parse(Argc, Argv);
  } catch (const CLI::ParseError &E) {
    int Code = App.exit(E);
    return Code == 0 ? Ok : InputError;
  }
  O.Model = {!NoEqualization, !NoRasterization, !NoPartialEnumeration};

  try {
    return O.BenchScales.empty() ? run(O) : bench(O);
  } catch (const frontend::ParseError &E) {
    std::cerr << O.Input << ":" << E.what() << "\n";
    return InputError;
  } catch (const poly::ParseError &E) {
    std::cerr << O.Input << ":" << E.what() << "\n";
    return InputError;
  } catch (const UsageError &E) {
    std::cerr << "error: " << E.what() << "\n";
    return InputError;
  } catch (const std::invalid_argument &E) {
    std::cerr << "error: " << E.what() << "\n";
    return InputError;
  } catch (const std::exception &E) {
    std::cerr << "internal error: " << E.what() << "\n";
    return InternalError;
  }
}

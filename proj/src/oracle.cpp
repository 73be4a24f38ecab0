#include "aid/oracle.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "aid/error.hpp"
#include "aid/io.hpp"

namespace aid {

void to_json(nlohmann::json& j, const InterventionRequest& r) {
  j = {{"intervene", r.predicates}, {"repetitions", r.repetitions}};
}

void from_json(const nlohmann::json& j, InterventionRequest& r) {
  r.predicates = j.at("intervene").get<std::vector<PredicateId>>();
  r.repetitions = j.value("repetitions", std::size_t{1});
  if (r.repetitions == 0) throw Error("intervention request with zero repetitions");
}

std::vector<ExecutionRun> CommandOracle::intervene(const std::vector<PredicateId>& predicates,
                                                   std::size_t repetitions) {
  auto dir = std::filesystem::temp_directory_path();
  std::string tmpl = (dir / "aid-request-XXXXXX").string();
  int fd = ::mkstemp(tmpl.data());
  if (fd < 0) throw Error("cannot create request file for oracle command");
  std::string request = nlohmann::json(InterventionRequest{predicates, repetitions}).dump() + "\n";
  auto written = ::write(fd, request.data(), request.size());
  ::close(fd);
  if (written != static_cast<ssize_t>(request.size())) {
    std::filesystem::remove(tmpl);
    throw Error("cannot write request file for oracle command");
  }

  std::string cmd = command_ + " < '" + tmpl + "'";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(tmpl);
    throw Error("cannot start oracle command: " + command_);
  }
  std::string output;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
  int status = ::pclose(pipe);
  std::filesystem::remove(tmpl);
  if (status != 0) throw Error("oracle command failed (status " + std::to_string(status) + "): " + command_);

  std::istringstream in(output);
  auto runs = io::parse_jsonl<ExecutionRun>(in, "oracle output");
  if (runs.size() != repetitions)
    throw Error("oracle command returned " + std::to_string(runs.size()) + " runs, expected " +
                std::to_string(repetitions));
  return runs;
}

}  // namespace aid

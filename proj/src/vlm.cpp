#include <cstdlib>
#include <fstream>

#include "benthic/planning.hpp"

#include <json.hpp>

// httplib pulls in a lot; keep it out of the headers
#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

namespace benthic {

namespace {

using nlohmann::json;

std::string base64_encode(const std::vector<uint8_t>& data) {
  static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    const uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(tbl[(n >> 18) & 63]);
    out.push_back(tbl[(n >> 12) & 63]);
    out.push_back(tbl[(n >> 6) & 63]);
    out.push_back(tbl[n & 63]);
  }
  if (i + 1 == data.size()) {
    const uint32_t n = data[i] << 16;
    out.push_back(tbl[(n >> 18) & 63]);
    out.push_back(tbl[(n >> 12) & 63]);
    out += "==";
  } else if (i + 2 == data.size()) {
    const uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(tbl[(n >> 18) & 63]);
    out.push_back(tbl[(n >> 12) & 63]);
    out.push_back(tbl[(n >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

uint64_t fnv1a64(const std::vector<uint8_t>& data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_request(const PromptBundle& bundle, const std::string& model) {
  json user_content = json::array();
  user_content.push_back({{"type", "text"}, {"text", bundle.task_text}});
  for (const PromptImage& img : bundle.images) {
    user_content.push_back(
        {{"type", "image"}, {"name", img.name}, {"data_base64", base64_encode(img.bytes)}});
  }
  json req = {{"model", model},
              {"messages", json::array({json{{"role", "system"}, {"content", bundle.system_text}},
                                        json{{"role", "user"}, {"content", user_content}}})}};
  return req.dump();
}

}  // namespace

MockTransport::MockTransport(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string MockTransport::complete(const std::string&) {
  if (next_ >= responses_.size()) throw IoError("mock transport out of scripted responses");
  return responses_[next_++];
}

HttpTransport::HttpTransport(const EndpointConfig& cfg) : cfg_(cfg) {}

std::string HttpTransport::complete(const std::string& request) {
  httplib::Client client(cfg_.url);
  client.set_connection_timeout(cfg_.timeout_s);
  client.set_read_timeout(cfg_.timeout_s);
  httplib::Headers headers;
  if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key != nullptr && *key != '\0')
    headers.emplace("Authorization", std::string("Bearer ") + key);
  auto res = client.Post(cfg_.path, headers, request, "application/json");
  if (!res) throw IoError("transport failure: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw IoError("endpoint returned status " + std::to_string(res->status));
  const json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded()) throw ParseError("endpoint returned invalid JSON");
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ParseError("endpoint response missing choices[0].message.content");
  }
}

RecordingTransport::RecordingTransport(std::unique_ptr<VlmTransport> inner,
                                       const std::string& path)
    : inner_(std::move(inner)), path_(path) {
  std::ofstream truncate(path_, std::ios::trunc);
  if (!truncate) throw IoError("cannot open transcript for write: " + path_);
}

std::string RecordingTransport::complete(const std::string& request) {
  const std::string response = inner_->complete(request);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append transcript: " + path_);
  const std::vector<uint8_t> req_bytes(request.begin(), request.end());
  json rec = {{"request_fnv1a64", fnv1a64(req_bytes)}, {"response", response}};
  out << rec.dump() << "\n";
  if (!out) throw IoError("transcript write failed: " + path_);
  return response;
}

ReplayTransport::ReplayTransport(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open transcript: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.contains("response"))
      throw ParseError("transcript line " + std::to_string(line_no) + ": bad record");
    responses_.push_back(rec.at("response").get<std::string>());
  }
}

std::string ReplayTransport::complete(const std::string&) {
  if (next_ >= responses_.size()) throw IoError("replay transcript exhausted");
  return responses_[next_++];
}

VlmPlanner::VlmPlanner(std::unique_ptr<VlmTransport> transport, const MissionConfig& mission,
                       int retries)
    : transport_(std::move(transport)), mission_(mission), retries_(retries) {}

PlanStepRecord VlmPlanner::plan(const PlanContext& ctx) {
  PlanStepRecord rec;
  rec.step_index = ctx.step_index;

  const PromptBundle bundle = build_prompt(ctx, mission_);
  rec.prompt = bundle.task_text;
  const std::string request = serialize_request(bundle, "default");

  std::string response;
  bool got_response = false;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    try {
      response = transport_->complete(request);
      got_response = true;
      break;
    } catch (const std::exception& e) {
      rec.error = std::string("transport attempt ") + std::to_string(attempt + 1) +
                  " failed: " + e.what();
    }
  }
  if (!got_response) {
    rec.action = Action::stop();
    rec.safety_note = "transport exhausted; safe stop";
    return rec;
  }
  rec.response = response;
  try {
    rec.action = parse_response(response, mission_.actions, &rec.parse_note);
  } catch (const std::exception& e) {
    rec.action = Action::stop();
    rec.error = std::string("parse failure: ") + e.what();
    rec.safety_note = "unparseable response; safe stop";
  }
  return rec;
}

}  // namespace benthic

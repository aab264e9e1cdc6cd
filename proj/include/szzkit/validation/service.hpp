#pragma once

#include <functional>
#include <memory>
#include <string>

#include "szzkit/validation/store.hpp"

namespace szzkit::validation {

// HTTP front end of a ValidationStore. Every request must carry the session
// token in the X-Session-Token header; the rater is named per request.
//
//   GET  /queues/{links|issues|conflicts}?rater=R
//   GET  /items/{id}
//   GET  /summary
//   POST /decisions/link        {"commit","issue","rater","verdict"}
//   POST /decisions/issue-type  {"issue","rater","label","round","in_doubt"?}
class ValidationService {
 public:
  using Clock = std::function<Timestamp()>;

  ValidationService(ValidationStore& store, std::string token, Clock clock = {});
  ~ValidationService();
  ValidationService(const ValidationService&) = delete;
  ValidationService& operator=(const ValidationService&) = delete;

  // Blocks until stop() is called. Returns false when the port cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds without serving yet; serve with listen_after_bind().
  bool bind(const std::string& host, int port);
  // Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace szzkit::validation

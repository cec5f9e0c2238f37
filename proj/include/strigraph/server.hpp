// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "strigraph/theories.hpp"

namespace strigraph {

struct ServerOptions {
  /// Value of Access-Control-Allow-Origin.
  std::string cors_origin = "*";
};

/// HTTP/JSON derivation sessions over the bundled and uploaded theories.
///
///   GET  /health
///   POST /theories                      {theory:<.theory>, rules?:<.rules>}
///   POST /derivations                   {theory, graph:<.graph>}
///   GET  /derivations/{id}
///   GET  /derivations/{id}/matches?rule=name
///   POST /derivations/{id}/apply        {rule, match_index, revision?}
///   POST /derivations/{id}/undo
///   GET  /derivations/{id}/export       derivation document
///   POST /eval                          <.graph>
///
/// Errors are {error, detail}: 400 malformed body, 404 unknown id, 409 stale
/// match or revision, 422 any other domain error.
class Server {
 public:
  explicit Server(ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void add_theory(Theory t);

  /// Binds to `port`, or to a free port when it is 0. Returns the port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false if the socket failed.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace strigraph

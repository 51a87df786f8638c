#ifndef GLG_NET_HPP
#define GLG_NET_HPP

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace glg::net {

struct NetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Move-only RAII socket.
class Socket {
  public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            close_fd();
            fd_ = o.fd_;
            o.fd_ = -1;
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close_fd(); }

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }

    void close_fd() {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

    void shutdown_both() {
        if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    }

  private:
    int fd_ = -1;
};

inline Socket tcp_listen(const std::string& addr, int port, int backlog = 8) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw NetError("socket: " + std::string(std::strerror(errno)));
    Socket s(fd);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(static_cast<std::uint16_t>(port));
    if (addr.empty() || addr == "0.0.0.0") {
        sa.sin_addr.s_addr = INADDR_ANY;
    } else if (::inet_pton(AF_INET, addr.c_str(), &sa.sin_addr) != 1) {
        throw NetError("bad listen address: " + addr);
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0)
        throw NetError("bind " + addr + ":" + std::to_string(port) + ": " + std::strerror(errno));
    if (::listen(fd, backlog) != 0) throw NetError("listen: " + std::string(std::strerror(errno)));
    return s;
}

/// Port actually bound (resolves port 0 to the assigned one).
inline int local_port(const Socket& s) {
    sockaddr_in sa{};
    socklen_t len = sizeof(sa);
    if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&sa), &len) != 0)
        throw NetError("getsockname failed");
    return ntohs(sa.sin_port);
}

/// Wait for an incoming connection; empty socket on timeout.
inline Socket tcp_accept(const Socket& listener, int timeout_ms) {
    pollfd pfd{listener.fd(), POLLIN, 0};
    int rv = ::poll(&pfd, 1, timeout_ms);
    if (rv <= 0) return Socket();
    int fd = ::accept(listener.fd(), nullptr, nullptr);
    if (fd < 0) return Socket();
    return Socket(fd);
}

inline Socket tcp_connect(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    std::string service = std::to_string(port);
    int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res);
    if (rc != 0) throw NetError("resolve " + host + ": " + gai_strerror(rc));
    Socket s;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            s = Socket(fd);
            break;
        }
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (!s.valid()) throw NetError("connect " + host + ":" + service + " failed");
    int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return s;
}

inline bool send_all(const Socket& s, const std::uint8_t* data, std::size_t len) {
    std::size_t off = 0;
    while (off < len) {
        ssize_t n = ::send(s.fd(), data + off, len - off, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && (errno == EINTR)) continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

/// recv with poll timeout: >0 bytes read, 0 orderly close, -1 timeout,
/// -2 error.
inline ssize_t recv_some(const Socket& s, std::uint8_t* buf, std::size_t cap, int timeout_ms) {
    pollfd pfd{s.fd(), POLLIN, 0};
    int rv = ::poll(&pfd, 1, timeout_ms);
    if (rv == 0) return -1;
    if (rv < 0) return errno == EINTR ? -1 : -2;
    ssize_t n = ::recv(s.fd(), buf, cap, 0);
    if (n < 0) return (errno == EINTR || errno == EAGAIN) ? -1 : -2;
    return n;
}

} // namespace glg::net

#endif // GLG_NET_HPP

// Read access to a git repository through the git command-line client.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvalue::process {
class Pipe;
}

namespace cvalue::repo {

class RepositoryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class NotARepository : public RepositoryError {
public:
  using RepositoryError::RepositoryError;
};
class CorruptHistory : public RepositoryError {
public:
  using RepositoryError::RepositoryError;
};
class MissingBlob : public RepositoryError {
public:
  using RepositoryError::RepositoryError;
};
class MissingAuthor : public RepositoryError {
public:
  using RepositoryError::RepositoryError;
};

struct DeveloperIdentity {
  std::string email;  // lowercase, trimmed; the aggregation key
  std::string display_name;
  bool is_bot = false;
};

enum class ChangeKind { Added, Deleted, Modified, Renamed };

std::string_view to_string(ChangeKind kind);

/// One path touched by a commit, relative to the first parent.
struct FileEntry {
  std::string path;
  std::string old_path;  // differs from path for renames
  ChangeKind kind = ChangeKind::Modified;
  std::string old_blob;  // empty when added
  std::string new_blob;  // empty when deleted
};

struct CommitRecord {
  std::string id;
  std::vector<std::string> parent_ids;
  std::string author_name;
  std::string author_email;
  long long timestamp = 0;
  std::vector<FileEntry> changed_files;
};

struct FileChange {
  std::string path;
  std::string old_path;
  ChangeKind kind = ChangeKind::Modified;
  std::optional<std::string> before_content;
  std::optional<std::string> after_content;
  bool binary = false;
};

struct VersionTree {
  std::map<std::string, CommitRecord> commits;
  std::vector<std::string> heads;

  bool empty() const { return commits.empty(); }
};

struct BotPatterns {
  std::vector<std::string> patterns{"dependabot", "[bot]"};
};

/// Case-insensitive substring match of any pattern against email or name.
/// Throws MissingAuthor when both are empty.
DeveloperIdentity resolve_developer(const CommitRecord &commit, const BotPatterns &bots = {});

/// Depth-first order over the first-parent tree. Children of a commit are
/// visited in (timestamp, id) order and each child's subtree is emitted in
/// full before the next child starts.
std::vector<const CommitRecord *> walk_commits(const VersionTree &tree);

/// Number of extra children summed over all commits of the first-parent
/// tree: how many times a walk has to return to an earlier fork.
std::size_t count_forks(const VersionTree &tree);

class Repository {
public:
  /// Throws NotARepository.
  explicit Repository(std::filesystem::path path);
  ~Repository();

  const std::filesystem::path &path() const { return path_; }

  /// All commits reachable from every local branch head, or from `branch`.
  VersionTree load(const std::optional<std::string> &branch = std::nullopt) const;

  /// Contents of a blob. Throws MissingBlob.
  std::string blob(const std::string &id) const;

  /// Changes against the first parent with contents filled in.
  std::vector<FileChange> changed_files(const CommitRecord &commit) const;

  /// path -> blob id for every file at `commit`.
  std::map<std::string, std::string> tree_of(const std::string &commit) const;

  /// Stable identifier for cache keys (hash of the absolute git dir).
  std::string fingerprint() const;

private:
  std::vector<std::string> git(std::initializer_list<std::string> args) const;
  std::string git_output(const std::vector<std::string> &args) const;

  std::filesystem::path path_;
  std::filesystem::path git_dir_;
  mutable std::mutex blob_mutex_;
  mutable std::unique_ptr<process::Pipe> cat_file_;
};

VersionTree open_repository(const std::filesystem::path &path, const std::optional<std::string> &branch = std::nullopt);

bool is_binary(const std::string &content);

}  // namespace cvalue::repo

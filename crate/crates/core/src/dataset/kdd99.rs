//! Built-in KDD99 schema and attack taxonomy.

use super::{FeatureKind, Schema};

use FeatureKind::{Categorical as Cat, Continuous as Con};

/// The 41 predictive columns of `kddcup.data`, in file order.
pub const FEATURES: [(&str, FeatureKind); 41] = [
    ("duration", Con),
    ("protocol_type", Cat),
    ("service", Cat),
    ("flag", Cat),
    ("src_bytes", Con),
    ("dst_bytes", Con),
    ("land", Con),
    ("wrong_fragment", Con),
    ("urgent", Con),
    ("hot", Con),
    ("num_failed_logins", Con),
    ("logged_in", Con),
    ("num_compromised", Con),
    ("root_shell", Con),
    ("su_attempted", Con),
    ("num_root", Con),
    ("num_file_creations", Con),
    ("num_shells", Con),
    ("num_access_files", Con),
    ("num_outbound_cmds", Con),
    ("is_host_login", Con),
    ("is_guest_login", Con),
    ("count", Con),
    ("srv_count", Con),
    ("serror_rate", Con),
    ("srv_serror_rate", Con),
    ("rerror_rate", Con),
    ("srv_rerror_rate", Con),
    ("same_srv_rate", Con),
    ("diff_srv_rate", Con),
    ("srv_diff_host_rate", Con),
    ("dst_host_count", Con),
    ("dst_host_srv_count", Con),
    ("dst_host_same_srv_rate", Con),
    ("dst_host_diff_srv_rate", Con),
    ("dst_host_same_src_port_rate", Con),
    ("dst_host_srv_diff_host_rate", Con),
    ("dst_host_serror_rate", Con),
    ("dst_host_srv_serror_rate", Con),
    ("dst_host_rerror_rate", Con),
    ("dst_host_srv_rerror_rate", Con),
];

/// Standard attack -> category table (`training_attack_types`), editable copy
/// of which can be passed on the command line.
pub const ATTACK_CATEGORIES: &str = "\
back dos
land dos
neptune dos
pod dos
smurf dos
teardrop dos
apache2 dos
mailbomb dos
processtable dos
udpstorm dos
ipsweep probe
nmap probe
portsweep probe
satan probe
mscan probe
saint probe
ftp_write r2l
guess_passwd r2l
imap r2l
multihop r2l
phf r2l
spy r2l
warezclient r2l
warezmaster r2l
named r2l
sendmail r2l
snmpgetattack r2l
snmpguess r2l
worm r2l
xlock r2l
xsnoop r2l
buffer_overflow u2r
loadmodule u2r
perl u2r
rootkit u2r
httptunnel u2r
ps u2r
sqlattack u2r
xterm u2r
";

pub fn schema() -> Schema {
    Schema::from_pairs(FEATURES).expect("built-in schema is valid")
}

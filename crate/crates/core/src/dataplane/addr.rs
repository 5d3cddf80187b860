use std::fmt;
use std::net::Ipv4Addr;

/// 48-bit Ethernet address stored in the low bits of a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MacAddr(u64);

impl MacAddr {
    pub const BROADCAST: MacAddr = MacAddr(0xffff_ffff_ffff);

    pub fn new(value: u64) -> Self {
        MacAddr(value & 0xffff_ffff_ffff)
    }

    /// Address of host `index` (1-based), assigned sequentially like the emulator does.
    pub fn for_host(index: u32) -> Self {
        MacAddr::new(index as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_broadcast(self) -> bool {
        self == Self::BROADCAST
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.0.to_be_bytes();
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            b[2], b[3], b[4], b[5], b[6], b[7]
        )
    }
}

/// IPv4 address of host `index` (1-based): `10.0.0.index` for the first 254
/// hosts, continuing through the 10.0.0.0/8 block after that.
pub fn host_ip(index: u32) -> Ipv4Addr {
    Ipv4Addr::from(u32::from(Ipv4Addr::new(10, 0, 0, 0)) + index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_addresses() {
        assert_eq!(MacAddr::for_host(1).to_string(), "00:00:00:00:00:01");
        assert_eq!(MacAddr::for_host(300).to_string(), "00:00:00:00:01:2c");
        assert_eq!(host_ip(1), Ipv4Addr::new(10, 0, 0, 1));
        assert_eq!(host_ip(254), Ipv4Addr::new(10, 0, 0, 254));
    }

    #[test]
    fn broadcast() {
        assert!(MacAddr::BROADCAST.is_broadcast());
        assert_eq!(MacAddr::BROADCAST.to_string(), "ff:ff:ff:ff:ff:ff");
        assert_eq!(MacAddr::new(u64::MAX), MacAddr::BROADCAST);
    }
}

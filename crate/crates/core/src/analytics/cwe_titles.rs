use crate::corpus::CweId;

// (number, title), sorted by number.
static TITLES: &[(u64, &str)] = &[
    (20, "Improper Input Validation"),
    (22, "Improper Limitation of a Pathname to a Restricted Directory ('Path Traversal')"),
    (77, "Improper Neutralization of Special Elements used in a Command ('Command Injection')"),
    (78, "Improper Neutralization of Special Elements used in an OS Command ('OS Command Injection')"),
    (79, "Improper Neutralization of Input During Web Page Generation ('Cross-site Scripting')"),
    (89, "Improper Neutralization of Special Elements used in an SQL Command ('SQL Injection')"),
    (94, "Improper Control of Generation of Code ('Code Injection')"),
    (119, "Improper Restriction of Operations within the Bounds of a Memory Buffer"),
    (120, "Buffer Copy without Checking Size of Input ('Classic Buffer Overflow')"),
    (121, "Stack-based Buffer Overflow"),
    (122, "Heap-based Buffer Overflow"),
    (125, "Out-of-bounds Read"),
    (190, "Integer Overflow or Wraparound"),
    (200, "Exposure of Sensitive Information to an Unauthorized Actor"),
    (203, "Observable Discrepancy"),
    (208, "Observable Timing Discrepancy"),
    (256, "Plaintext Storage of a Password"),
    (257, "Storing Passwords in a Recoverable Format"),
    (259, "Use of Hard-coded Password"),
    (261, "Weak Encoding for Password"),
    (269, "Improper Privilege Management"),
    (276, "Incorrect Default Permissions"),
    (284, "Improper Access Control"),
    (285, "Improper Authorization"),
    (287, "Improper Authentication"),
    (290, "Authentication Bypass by Spoofing"),
    (294, "Authentication Bypass by Capture-replay"),
    (295, "Improper Certificate Validation"),
    (297, "Improper Validation of Certificate with Host Mismatch"),
    (306, "Missing Authentication for Critical Function"),
    (307, "Improper Restriction of Excessive Authentication Attempts"),
    (310, "Cryptographic Issues"),
    (311, "Missing Encryption of Sensitive Data"),
    (312, "Cleartext Storage of Sensitive Information"),
    (319, "Cleartext Transmission of Sensitive Information"),
    (320, "Key Management Errors"),
    (321, "Use of Hard-coded Cryptographic Key"),
    (323, "Reusing a Nonce, Key Pair in Encryption"),
    (324, "Use of a Key Past its Expiration Date"),
    (325, "Missing Cryptographic Step"),
    (326, "Inadequate Encryption Strength"),
    (327, "Use of a Broken or Risky Cryptographic Algorithm"),
    (328, "Use of Weak Hash"),
    (329, "Generation of Predictable IV with CBC Mode"),
    (330, "Use of Insufficiently Random Values"),
    (331, "Insufficient Entropy"),
    (338, "Use of Cryptographically Weak Pseudo-Random Number Generator (PRNG)"),
    (345, "Insufficient Verification of Data Authenticity"),
    (347, "Improper Verification of Cryptographic Signature"),
    (352, "Cross-Site Request Forgery (CSRF)"),
    (362, "Concurrent Execution using Shared Resource with Improper Synchronization ('Race Condition')"),
    (400, "Uncontrolled Resource Consumption"),
    (416, "Use After Free"),
    (434, "Unrestricted Upload of File with Dangerous Type"),
    (476, "NULL Pointer Dereference"),
    (502, "Deserialization of Untrusted Data"),
    (521, "Weak Password Requirements"),
    (522, "Insufficiently Protected Credentials"),
    (532, "Insertion of Sensitive Information into Log File"),
    (601, "URL Redirection to Untrusted Site ('Open Redirect')"),
    (611, "Improper Restriction of XML External Entity Reference"),
    (613, "Insufficient Session Expiration"),
    (639, "Authorization Bypass Through User-Controlled Key"),
    (640, "Weak Password Recovery Mechanism for Forgotten Password"),
    (668, "Exposure of Resource to Wrong Sphere"),
    (732, "Incorrect Permission Assignment for Critical Resource"),
    (759, "Use of a One-Way Hash without a Salt"),
    (760, "Use of a One-Way Hash with a Predictable Salt"),
    (770, "Allocation of Resources Without Limits or Throttling"),
    (787, "Out-of-bounds Write"),
    (798, "Use of Hard-coded Credentials"),
    (862, "Missing Authorization"),
    (863, "Incorrect Authorization"),
    (916, "Use of Password Hash With Insufficient Computational Effort"),
    (918, "Server-Side Request Forgery (SSRF)"),
    (922, "Insecure Storage of Sensitive Information"),
    (1021, "Improper Restriction of Rendered UI Layers or Frames"),
    (1240, "Use of a Cryptographic Primitive with a Risky Implementation"),
];

/// Title from the bundled table; `None` for pseudo-identifiers and ids the
/// table does not cover.
pub fn cwe_title(cwe: &CweId) -> Option<&'static str> {
    let number = cwe.number()?;
    TITLES.binary_search_by_key(&number, |&(n, _)| n).ok().map(|i| TITLES[i].1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sorted_and_unique() {
        assert!(TITLES.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn lookups() {
        let id = |s| CweId::parse(s).unwrap();
        assert_eq!(cwe_title(&id("CWE-798")), Some("Use of Hard-coded Credentials"));
        assert_eq!(cwe_title(&id("CWE-295")), Some("Improper Certificate Validation"));
        assert_eq!(cwe_title(&id("NVD-CWE-noinfo")), None);
        assert_eq!(cwe_title(&id("CWE-99999")), None);
    }
}

//! Codes and names of the 45 industrial poles of the OECD harmonised national
//! input-output tables.

pub struct IndustryTable;

const POLES: [(&str, &str); 45] = [
    ("D01T02", "Agriculture, hunting, forestry"),
    ("D03", "Fishing and aquaculture"),
    ("D05T06", "Mining and quarrying, energy producing products"),
    ("D07T08", "Mining and quarrying, non-energy producing products"),
    ("D09", "Mining support service activities"),
    ("D10T12", "Food products, beverages and tobacco"),
    ("D13T15", "Textiles, textile products, leather and footwear"),
    ("D16", "Wood and products of wood and cork"),
    ("D17T18", "Paper products and printing"),
    ("D19", "Coke and refined petroleum products"),
    ("D20", "Chemical and chemical products"),
    ("D21", "Pharmaceuticals, medicinal chemical and botanical products"),
    ("D22", "Rubber and plastics products"),
    ("D23", "Other non-metallic mineral products"),
    ("D24", "Basic metals"),
    ("D25", "Fabricated metal products"),
    ("D26", "Computer, electronic and optical equipment"),
    ("D27", "Electrical equipment"),
    ("D28", "Machinery and equipment, nec"),
    ("D29", "Motor vehicles, trailers and semi-trailers"),
    ("D30", "Other transport equipment"),
    ("D31T33", "Manufacturing nec; repair and installation of machinery and equipment"),
    ("D35", "Electricity, gas, steam and air conditioning supply"),
    ("D36T39", "Water supply; sewerage, waste management and remediation activities"),
    ("D41T43", "Construction"),
    ("D45T47", "Wholesale and retail trade; repair of motor vehicles"),
    ("D49", "Land transport and transport via pipelines"),
    ("D50", "Water transport"),
    ("D51", "Air transport"),
    ("D52", "Warehousing and support activities for transportation"),
    ("D53", "Postal and courier activities"),
    ("D55T56", "Accommodation and food service activities"),
    ("D58T60", "Publishing, audiovisual and broadcasting activities"),
    ("D61", "Telecommunications"),
    ("D62T63", "IT and other information services"),
    ("D64T66", "Financial and insurance activities"),
    ("D68", "Real estate activities"),
    ("D69T75", "Professional, scientific and technical activities"),
    ("D77T82", "Administrative and support services"),
    ("D84", "Public administration and defense; compulsory social security"),
    ("D85", "Education"),
    ("D86T88", "Human health and social work activities"),
    ("D90T93", "Arts, entertainment and recreation"),
    ("D94T96", "Other service activities"),
    (
        "D97T98",
        "Activities of households as employers; undifferentiated goods- and services-producing activities of households for own use",
    ),
];

impl IndustryTable {
    pub fn entries() -> &'static [(&'static str, &'static str)] {
        &POLES
    }

    pub fn codes() -> impl Iterator<Item = &'static str> {
        POLES.iter().map(|(c, _)| *c)
    }

    pub fn description(code: &str) -> Option<&'static str> {
        POLES.iter().find(|(c, _)| *c == code).map(|(_, d)| *d)
    }

    pub fn len() -> usize {
        POLES.len()
    }
}

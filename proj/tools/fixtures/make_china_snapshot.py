# Writes data/china_ecdc_snapshot.csv: China rows of the ECDC daily report
# layout, 31/12/2019 to 31/03/2020, newest first as in the ECDC file.
# Counts are keyed by ECDC report date (national report of the previous day).
import datetime as dt
import pathlib

deaths = {
    "2020-01-21": 6,  # deaths reported up to 20 January, lumped
    "2020-01-22": 3, "2020-01-23": 8, "2020-01-24": 8, "2020-01-25": 16, "2020-01-26": 15,
    "2020-01-27": 24, "2020-01-28": 26, "2020-01-29": 26, "2020-01-30": 38, "2020-01-31": 43,
    "2020-02-01": 46, "2020-02-02": 45, "2020-02-03": 57, "2020-02-04": 64, "2020-02-05": 65,
    "2020-02-06": 73, "2020-02-07": 73, "2020-02-08": 86, "2020-02-09": 89, "2020-02-10": 97,
    "2020-02-11": 108, "2020-02-12": 97, "2020-02-13": 254, "2020-02-14": 13, "2020-02-15": 143,
    "2020-02-16": 142, "2020-02-17": 105, "2020-02-18": 98, "2020-02-19": 136, "2020-02-20": 114,
    "2020-02-21": 118, "2020-02-22": 109, "2020-02-23": 97, "2020-02-24": 150, "2020-02-25": 71,
    "2020-02-26": 52, "2020-02-27": 29, "2020-02-28": 44, "2020-02-29": 47,
    "2020-03-01": 35, "2020-03-02": 42, "2020-03-03": 31, "2020-03-04": 38, "2020-03-05": 31,
    "2020-03-06": 30, "2020-03-07": 28, "2020-03-08": 27, "2020-03-09": 22, "2020-03-10": 17,
    "2020-03-11": 22, "2020-03-12": 11, "2020-03-13": 7, "2020-03-14": 13, "2020-03-15": 10,
    "2020-03-16": 14, "2020-03-17": 13, "2020-03-18": 11, "2020-03-19": 8, "2020-03-20": 3,
    "2020-03-21": 7, "2020-03-22": 6, "2020-03-23": 9, "2020-03-24": 7, "2020-03-25": 4,
    "2020-03-26": 6, "2020-03-27": 5, "2020-03-28": 3, "2020-03-29": 5, "2020-03-30": 4,
    "2020-03-31": 1,
}

header = "dateRep,day,month,year,deaths,countriesAndTerritories,geoId,countryterritoryCode,popData2019,continentExp"
rows = [header]
day = dt.date(2020, 3, 31)
while day >= dt.date(2019, 12, 31):
    n = deaths.get(day.isoformat(), 0)
    rows.append(f"{day:%d/%m/%Y},{day.day},{day.month},{day.year},{n},China,CN,CHN,1433783686,Asia")
    day -= dt.timedelta(days=1)

out = pathlib.Path(__file__).resolve().parents[2] / "data" / "china_ecdc_snapshot.csv"
out.write_text("\n".join(rows) + "\n")
print(out, "total deaths", sum(deaths.values()))

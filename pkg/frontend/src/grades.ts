/** The four relevance grades, highest first, with their submission codes. */

export interface GradeDef {
  label: string;
  code: number;
  key: string;
  description: string;
}

export const GRADES: GradeDef[] = [
  {
    label: "R",
    code: 3,
    key: "3",
    description:
      "Relevant: finding this formula is just as good as finding the query formula.",
  },
  {
    label: "P+",
    code: 2,
    key: "2",
    description:
      "Partially relevant, upper bin: helpful, but not to the same degree as an exact match.",
  },
  {
    label: "P-",
    code: 1,
    key: "1",
    description:
      "Partially relevant, lower bin: there is some chance this formula leads to useful information.",
  },
  {
    label: "N",
    code: 0,
    key: "0",
    description: "Not relevant: not expected to be useful.",
  },
];

export function gradeForKey(key: string): GradeDef | null {
  return GRADES.find((g) => g.key === key) ?? null;
}

export function gradeForLabel(label: string): GradeDef | null {
  return GRADES.find((g) => g.label === label) ?? null;
}

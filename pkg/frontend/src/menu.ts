/** The left menu bar: exactly these six customer functions, in this order. */

export const MENU_ENTRIES = [
  "View Account",
  "Transfer Funds",
  "Pay Bills",
  "Cheque Services",
  "Utility",
  "Logout",
] as const;

export type MenuEntry = (typeof MENU_ENTRIES)[number];
